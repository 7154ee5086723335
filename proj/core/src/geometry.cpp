#include "rtflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Geometry>

#include "rtflow/errors.hpp"
#include "rtflow/sphere_grid.hpp"

namespace rtflow {

TangentField::TangentField(LiftedGrid g) : grid(std::move(g)) {
  spatial.assign(grid.size() * spatial_components(), 0.0);
  angular.assign(grid.size() * angular_components(), 0.0);
}

void FrameComponents::resize(const LiftedGrid& grid, bool across_components) {
  const std::size_t n = grid.size();
  with_across = across_components;
  along.assign(n, 0.0);
  const std::size_t n_across = across_components ? static_cast<std::size_t>(grid.dim - 1) : 0;
  for (std::size_t k = 0; k < 2; ++k) {
    if (k < n_across)
      across[k].assign(n, 0.0);
    else
      across[k].clear();
  }
  const std::size_t n_ang = grid.dim == 2 ? 1 : 3;
  for (std::size_t k = 0; k < 3; ++k) {
    if (k < n_ang)
      angular[k].assign(n, 0.0);
    else
      angular[k].clear();
  }
}

GeometryOperators::GeometryOperators(LiftedGrid grid, Interpolation interp)
    : grid_(std::move(grid)), interp_(interp) {
  grid_.validate();
  const std::size_t no = grid_.n_orient;
  normals_.resize(no);
  across_.resize(no);
  if (grid_.dim == 2) {
    const auto dirs = planar_directions(no);
    for (std::size_t o = 0; o < no; ++o) {
      normals_[o] = {dirs[o].x(), dirs[o].y(), 0.0};
      across_[o][0] = {-dirs[o].y(), dirs[o].x(), 0.0};
      across_[o][1] = Eigen::Vector3d::Zero();
    }
  } else {
    for (std::size_t o = 0; o < no; ++o) {
      const Eigen::Vector3d n = grid_.sphere->vertex(o);
      int k = 0;
      for (int i = 1; i < 3; ++i)
        if (std::abs(n[i]) < std::abs(n[k])) k = i;
      Eigen::Vector3d axis = Eigen::Vector3d::Zero();
      axis[k] = 1.0;
      const Eigen::Vector3d e1 = axis.cross(n).normalized();
      normals_[o] = n;
      across_[o][0] = e1;
      across_[o][1] = n.cross(e1);
    }
  }
  along_ops_.reserve(no);
  across_ops_.reserve(no * static_cast<std::size_t>(grid_.dim - 1));
  for (std::size_t o = 0; o < no; ++o) {
    along_ops_.emplace_back(normals_[o], grid_.h, interp_, grid_.dim);
    for (int k = 0; k < grid_.dim - 1; ++k) across_ops_.emplace_back(across_[o][k], grid_.h, interp_, grid_.dim);
  }
}

std::span<const Eigen::Vector3d> GeometryOperators::across_directions(std::size_t o) const {
  return std::span<const Eigen::Vector3d>(across_[o].data(), static_cast<std::size_t>(grid_.dim - 1));
}

void GeometryOperators::check_shape(const LiftedGrid& g) const {
  if (!grid_.same_shape(g)) throw ConfigError("field shape does not match the operator grid");
}

void GeometryOperators::derivatives(std::span<const double> u, bool with_across, FrameComponents& out) const {
  if (u.size() != grid_.size()) throw ConfigError("field size does not match the operator grid");
  out.resize(grid_, with_across);
  const Extents ext = extents();
  const std::size_t ns = grid_.spatial_size();
  const std::size_t no = grid_.n_orient;
  const std::size_t n_across = static_cast<std::size_t>(grid_.dim - 1);

  std::vector<double> coeff;
  for (std::size_t o = 0; o < no; ++o) {
    std::span<const double> src = u.subspan(o * ns, ns);
    if (interp_ == Interpolation::cubic_bspline) {
      coeff.assign(src.begin(), src.end());
      bspline_prefilter(ext, grid_.boundary, coeff);
      src = coeff;
    }
    along_ops_[o].gather(ext, grid_.boundary, src, std::span<double>(out.along).subspan(o * ns, ns));
    if (with_across) {
      for (std::size_t k = 0; k < n_across; ++k) {
        across_ops_[o * n_across + k].gather(ext, grid_.boundary, src,
                                             std::span<double>(out.across[k]).subspan(o * ns, ns));
      }
    }
  }

  if (grid_.dim == 2) {
    if (no < 3) return;  // single orientation: no angular variation
    const double inv = 1.0 / (2.0 * grid_.h_a);
    auto& dth = out.angular[0];
    for (std::size_t o = 0; o < no; ++o) {
      const double* up = u.data() + ((o + 1) % no) * ns;
      const double* dn = u.data() + ((o + no - 1) % no) * ns;
      double* dst = dth.data() + o * ns;
      for (std::size_t s = 0; s < ns; ++s) dst[s] = (up[s] - dn[s]) * inv;
    }
    return;
  }

  const SphereSampling& sph = *grid_.sphere;
  for (std::size_t i = 0; i < no; ++i) {
    double* gx = out.angular[0].data() + i * ns;
    double* gy = out.angular[1].data() + i * ns;
    double* gz = out.angular[2].data() + i * ns;
    const double* ui = u.data() + i * ns;
    const auto nb = sph.neighbors(i);
    const auto co = sph.gradient_coefficients(i);
    for (std::size_t r = 0; r < nb.size(); ++r) {
      const double* uj = u.data() + static_cast<std::size_t>(nb[r]) * ns;
      const double ax = co[r].x();
      const double ay = co[r].y();
      const double az = co[r].z();
      for (std::size_t s = 0; s < ns; ++s) {
        const double diff = uj[s] - ui[s];
        gx[s] += ax * diff;
        gy[s] += ay * diff;
        gz[s] += az * diff;
      }
    }
  }
}

void GeometryOperators::derivatives_adjoint(const FrameComponents& c, std::span<double> out) const {
  if (out.size() != grid_.size() || c.along.size() != grid_.size()) {
    throw ConfigError("frame components do not match the operator grid");
  }
  std::fill(out.begin(), out.end(), 0.0);
  const Extents ext = extents();
  const std::size_t ns = grid_.spatial_size();
  const std::size_t no = grid_.n_orient;
  const std::size_t n_across = static_cast<std::size_t>(grid_.dim - 1);

  std::vector<double> tmp;
  for (std::size_t o = 0; o < no; ++o) {
    std::span<double> dst = out.subspan(o * ns, ns);
    std::span<double> acc = dst;
    if (interp_ == Interpolation::cubic_bspline) {
      tmp.assign(ns, 0.0);
      acc = tmp;
    }
    along_ops_[o].scatter(ext, grid_.boundary, std::span<const double>(c.along).subspan(o * ns, ns), acc);
    if (c.with_across) {
      for (std::size_t k = 0; k < n_across; ++k) {
        across_ops_[o * n_across + k].scatter(ext, grid_.boundary,
                                              std::span<const double>(c.across[k]).subspan(o * ns, ns), acc);
      }
    }
    if (interp_ == Interpolation::cubic_bspline) {
      bspline_prefilter(ext, grid_.boundary, tmp);
      for (std::size_t s = 0; s < ns; ++s) dst[s] += tmp[s];
    }
  }

  if (grid_.dim == 2) {
    if (no < 3) return;
    const double inv = 1.0 / (2.0 * grid_.h_a);
    const auto& dth = c.angular[0];
    for (std::size_t o = 0; o < no; ++o) {
      const double* prev = dth.data() + ((o + no - 1) % no) * ns;
      const double* next = dth.data() + ((o + 1) % no) * ns;
      double* dst = out.data() + o * ns;
      for (std::size_t s = 0; s < ns; ++s) dst[s] += (prev[s] - next[s]) * inv;
    }
    return;
  }

  const SphereSampling& sph = *grid_.sphere;
  for (std::size_t k = 0; k < no; ++k) {
    double* dst = out.data() + k * ns;
    const Eigen::Vector3d& center = sph.gradient_center(k);
    {
      const double* vx = c.angular[0].data() + k * ns;
      const double* vy = c.angular[1].data() + k * ns;
      const double* vz = c.angular[2].data() + k * ns;
      for (std::size_t s = 0; s < ns; ++s) dst[s] -= center.x() * vx[s] + center.y() * vy[s] + center.z() * vz[s];
    }
    for (const auto& tap : sph.adjoint_taps(k)) {
      const std::size_t i = static_cast<std::size_t>(tap.vertex);
      const double* vx = c.angular[0].data() + i * ns;
      const double* vy = c.angular[1].data() + i * ns;
      const double* vz = c.angular[2].data() + i * ns;
      const double ax = tap.coeff.x();
      const double ay = tap.coeff.y();
      const double az = tap.coeff.z();
      for (std::size_t s = 0; s < ns; ++s) dst[s] += ax * vx[s] + ay * vy[s] + az * vz[s];
    }
  }
}

void GeometryOperators::squared_norm(const FrameComponents& c, const MetricParams& m, std::span<double> out) const {
  const std::size_t n = grid_.size();
  for (std::size_t i = 0; i < n; ++i) out[i] = m.d_s * c.along[i] * c.along[i];
  if (c.with_across && m.frac > 0.0) {
    const double f = m.frac * m.frac * m.d_s;
    for (std::size_t k = 0; k < static_cast<std::size_t>(grid_.dim - 1); ++k)
      for (std::size_t i = 0; i < n; ++i) out[i] += f * c.across[k][i] * c.across[k][i];
  }
  for (const auto& ang : c.angular) {
    if (ang.empty()) continue;
    for (std::size_t i = 0; i < n; ++i) out[i] += m.d_a * ang[i] * ang[i];
  }
}

TangentField GeometryOperators::gradient(const LiftedField& u, const MetricParams& m) const {
  m.validate();
  check_shape(u.grid());
  const bool with_across = m.frac > 0.0;
  FrameComponents c;
  derivatives(u.values(), with_across, c);

  TangentField g(grid_);
  const std::size_t ns = grid_.spatial_size();
  const std::size_t dim = static_cast<std::size_t>(grid_.dim);
  const double f2 = m.frac * m.frac;
  for (std::size_t o = 0; o < grid_.n_orient; ++o) {
    const Eigen::Vector3d& n = normals_[o];
    for (std::size_t s = 0; s < ns; ++s) {
      const std::size_t i = o * ns + s;
      Eigen::Vector3d v = c.along[i] * n;
      if (with_across) {
        for (std::size_t k = 0; k + 1 < dim; ++k) v += f2 * c.across[k][i] * across_[o][k];
      }
      v *= m.d_s;
      for (std::size_t k = 0; k < dim; ++k) g.spatial[i * dim + k] = v[static_cast<Eigen::Index>(k)];
      if (dim == 2) {
        g.angular[i] = m.d_a * c.angular[0][i];
      } else {
        for (std::size_t k = 0; k < 3; ++k) g.angular[i * 3 + k] = m.d_a * c.angular[k][i];
      }
    }
  }
  return g;
}

void GeometryOperators::to_frame(const TangentField& v, bool with_across, FrameComponents& out) const {
  check_shape(v.grid);
  const std::size_t dim = static_cast<std::size_t>(grid_.dim);
  if (v.spatial.size() != grid_.size() * dim || v.angular.size() != grid_.size() * v.angular_components()) {
    throw ConfigError("tangent field storage does not match its grid");
  }
  out.resize(grid_, with_across);
  const std::size_t ns = grid_.spatial_size();
  for (std::size_t o = 0; o < grid_.n_orient; ++o) {
    const Eigen::Vector3d& n = normals_[o];
    for (std::size_t s = 0; s < ns; ++s) {
      const std::size_t i = o * ns + s;
      Eigen::Vector3d vs = Eigen::Vector3d::Zero();
      for (std::size_t k = 0; k < dim; ++k) vs[static_cast<Eigen::Index>(k)] = v.spatial[i * dim + k];
      out.along[i] = vs.dot(n);
      if (with_across) {
        for (std::size_t k = 0; k + 1 < dim; ++k) out.across[k][i] = vs.dot(across_[o][k]);
      }
      if (dim == 2) {
        out.angular[0][i] = v.angular[i];
      } else {
        for (std::size_t k = 0; k < 3; ++k) out.angular[k][i] = v.angular[i * 3 + k];
      }
    }
  }
}

LiftedField GeometryOperators::divergence(const TangentField& v, const MetricParams& m) const {
  m.validate();
  FrameComponents c;
  to_frame(v, m.frac > 0.0, c);
  LiftedField out(grid_);
  derivatives_adjoint(c, out.values());
  for (double& x : out.values()) x = -x;
  return out;
}

LiftedField GeometryOperators::grad_norm(const TangentField& v, const MetricParams& m) const {
  m.validate();
  FrameComponents c;
  to_frame(v, m.frac > 0.0, c);
  LiftedField out(grid_);
  const std::size_t n = grid_.size();
  for (std::size_t i = 0; i < n; ++i) {
    double q = c.along[i] * c.along[i] / m.d_s;
    if (c.with_across) {
      for (std::size_t k = 0; k + 1 < static_cast<std::size_t>(grid_.dim); ++k)
        q += c.across[k][i] * c.across[k][i] / (m.frac * m.frac * m.d_s);
    }
    for (const auto& ang : c.angular)
      if (!ang.empty()) q += ang[i] * ang[i] / m.d_a;
    out[i] = std::sqrt(q);
  }
  return out;
}

LiftedField GeometryOperators::tv_density(const LiftedField& u, const MetricParams& m) const {
  m.validate();
  check_shape(u.grid());
  FrameComponents c;
  derivatives(u.values(), m.frac > 0.0, c);
  LiftedField out(grid_);
  squared_norm(c, m, out.values());
  const double e2 = m.eps * m.eps;
  for (double& x : out.values()) x = std::sqrt(x + e2);
  return out;
}

double GeometryOperators::tv_epsilon(const LiftedField& u, const MetricParams& m) const {
  const LiftedField density = tv_density(u, m);
  return Measure(grid_, m).integrate(density);
}

double GeometryOperators::metric_inner(const TangentField& u, const TangentField& v, const MetricParams& m) const {
  m.validate();
  const bool with_across = m.frac > 0.0;
  FrameComponents a;
  FrameComponents b;
  to_frame(u, with_across, a);
  to_frame(v, with_across, b);
  LiftedField pointwise(grid_);
  const std::size_t n = grid_.size();
  for (std::size_t i = 0; i < n; ++i) {
    double q = a.along[i] * b.along[i] / m.d_s;
    if (with_across) {
      for (std::size_t k = 0; k + 1 < static_cast<std::size_t>(grid_.dim); ++k)
        q += a.across[k][i] * b.across[k][i] / (m.frac * m.frac * m.d_s);
    }
    for (std::size_t k = 0; k < 3; ++k)
      if (!a.angular[k].empty()) q += a.angular[k][i] * b.angular[k][i] / m.d_a;
    pointwise[i] = q;
  }
  return Measure(grid_, m).integrate(pointwise);
}

TangentField gradient(const LiftedField& u, const MetricParams& m, Interpolation interp) {
  return GeometryOperators(u.grid(), interp).gradient(u, m);
}

LiftedField divergence(const TangentField& v, const MetricParams& m, Interpolation interp) {
  return GeometryOperators(v.grid, interp).divergence(v, m);
}

LiftedField grad_norm(const TangentField& v, const MetricParams& m) {
  return GeometryOperators(v.grid).grad_norm(v, m);
}

double tv_epsilon(const LiftedField& u, const MetricParams& m, Interpolation interp) {
  return GeometryOperators(u.grid(), interp).tv_epsilon(u, m);
}

double integrate(const LiftedField& f, const Measure& mu) { return mu.integrate(f); }

}  // namespace rtflow
