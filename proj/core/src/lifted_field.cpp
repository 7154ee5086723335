#include "rtflow/lifted_field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rtflow/errors.hpp"
#include "rtflow/sphere_grid.hpp"

namespace rtflow {

namespace {

bool valid_extent(std::size_t n) { return n == 1 || n >= 3; }

}  // namespace

LiftedGrid LiftedGrid::planar(std::size_t nx, std::size_t ny, std::size_t n_theta, double h,
                              Boundary boundary) {
  LiftedGrid g;
  g.dim = 2;
  g.nx = nx;
  g.ny = ny;
  g.nz = 1;
  g.n_orient = n_theta;
  g.h = h;
  g.h_a = n_theta > 0 ? 2.0 * std::numbers::pi / static_cast<double>(n_theta) : 0.0;
  g.boundary = boundary;
  g.validate();
  return g;
}

LiftedGrid LiftedGrid::spatial(std::size_t nx, std::size_t ny, std::size_t nz,
                               std::shared_ptr<const SphereSampling> sphere, double h,
                               Boundary boundary) {
  if (!sphere) throw ConfigError("d=3 grid requires a sphere sampling");
  LiftedGrid g;
  g.dim = 3;
  g.nx = nx;
  g.ny = ny;
  g.nz = nz;
  g.n_orient = sphere->size();
  g.h = h;
  g.h_a = sphere->h_a();
  g.sphere = std::move(sphere);
  g.boundary = boundary;
  g.validate();
  return g;
}

Eigen::Vector3d LiftedGrid::orientation(std::size_t o) const {
  if (dim == 3) return sphere->vertex(o);
  const double theta = h_a * static_cast<double>(o);
  // Same table as planar_directions(), without allocating it.
  const std::size_t q = n_orient % 4 == 0 ? n_orient / 4 : 0;
  if (q > 0) {
    const std::size_t k = o % q;
    const double base = h_a * static_cast<double>(k);
    Eigen::Vector3d v(std::cos(base), std::sin(base), 0.0);
    for (std::size_t r = 0; r < o / q; ++r) v = Eigen::Vector3d(-v.y(), v.x(), 0.0);
    return v;
  }
  return {std::cos(theta), std::sin(theta), 0.0};
}

std::vector<Eigen::Vector2d> planar_directions(std::size_t n_theta) {
  std::vector<Eigen::Vector2d> dirs(n_theta);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(n_theta);
  if (n_theta % 4 == 0) {
    const std::size_t q = n_theta / 4;
    for (std::size_t k = 0; k < q; ++k) {
      const double t = step * static_cast<double>(k);
      Eigen::Vector2d v(std::cos(t), std::sin(t));
      for (std::size_t r = 0; r < 4; ++r) {
        dirs[k + r * q] = v;
        v = Eigen::Vector2d(-v.y(), v.x());
      }
    }
  } else {
    for (std::size_t k = 0; k < n_theta; ++k) {
      const double t = step * static_cast<double>(k);
      dirs[k] = {std::cos(t), std::sin(t)};
    }
  }
  return dirs;
}

void LiftedGrid::validate() const {
  if (dim != 2 && dim != 3) throw ConfigError("dimension must be 2 or 3, got " + std::to_string(dim));
  if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("spatial step h must be positive");
  if (!valid_extent(nx) || !valid_extent(ny) || !valid_extent(nz)) {
    throw ConfigError("spatial extents must be 1 or >= 3 (got " + std::to_string(nx) + "x" +
                      std::to_string(ny) + "x" + std::to_string(nz) + ")");
  }
  if (dim == 2) {
    if (nz != 1) throw ConfigError("d=2 grid must have nz = 1");
    if (!valid_extent(n_orient)) {
      throw ConfigError("orientation count must be 1 or >= 3, got " + std::to_string(n_orient));
    }
    if (sphere) throw ConfigError("d=2 grid must not carry a sphere sampling");
  } else {
    if (!sphere) throw ConfigError("d=3 grid requires a sphere sampling");
    if (n_orient != sphere->size()) throw ConfigError("orientation count does not match sphere sampling");
  }
  if (!(h_a > 0.0)) throw ConfigError("angular step h_a must be positive");
}

bool LiftedGrid::same_shape(const LiftedGrid& other) const {
  if (dim != other.dim || nx != other.nx || ny != other.ny || nz != other.nz ||
      n_orient != other.n_orient)
    return false;
  if (dim == 3 && sphere != other.sphere) {
    if (!sphere || !other.sphere) return false;
    return sphere->vertices() == other.sphere->vertices();
  }
  return true;
}

LiftedField::LiftedField(LiftedGrid grid, double fill) : grid_(std::move(grid)) {
  grid_.validate();
  values_.assign(grid_.size(), fill);
}

LiftedField::LiftedField(LiftedGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  grid_.validate();
  if (values_.size() != grid_.size()) {
    throw ConfigError("field has " + std::to_string(values_.size()) + " samples, grid expects " +
                      std::to_string(grid_.size()));
  }
}

std::span<double> LiftedField::slice(std::size_t o) {
  const std::size_t n = grid_.spatial_size();
  return std::span<double>(values_).subspan(o * n, n);
}

std::span<const double> LiftedField::slice(std::size_t o) const {
  const std::size_t n = grid_.spatial_size();
  return std::span<const double>(values_).subspan(o * n, n);
}

bool LiftedField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double sup_norm(const LiftedField& u) {
  double s = 0.0;
  for (double v : u.values()) s = std::max(s, std::abs(v));
  return s;
}

LiftedField rotate_quarter_turn(const LiftedField& u) {
  const LiftedGrid& g = u.grid();
  if (g.dim != 2 || g.nx != g.ny || g.n_orient % 4 != 0) {
    throw ConfigError("quarter turn needs a square d=2 grid with N_theta divisible by 4");
  }
  LiftedField out(g);
  const std::size_t n = g.nx;
  const std::size_t q = g.n_orient / 4;
  for (std::size_t o = 0; o < g.n_orient; ++o) {
    const std::size_t o2 = (o + q) % g.n_orient;
    for (std::size_t y = 0; y < n; ++y)
      for (std::size_t x = 0; x < n; ++x) out.at(n - 1 - y, x, 0, o2) = u.at(x, y, 0, o);
  }
  return out;
}

}  // namespace rtflow
