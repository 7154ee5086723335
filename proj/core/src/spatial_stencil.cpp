#include "rtflow/spatial_stencil.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <map>
#include <tuple>

#include "rtflow/errors.hpp"

namespace rtflow {

namespace {

struct AxisWeights {
  int base = 0;
  std::array<double, 4> w{};
  int count = 0;
};

AxisWeights axis_weights(double p, Interpolation interp, bool active) {
  AxisWeights a;
  if (!active) {
    a.base = 0;
    a.w[0] = 1.0;
    a.count = 1;
    return a;
  }
  const double fl = std::floor(p);
  const double t = p - fl;
  if (interp == Interpolation::linear) {
    a.base = static_cast<int>(fl);
    a.w[0] = 1.0 - t;
    a.w[1] = t;
    a.count = 2;
  } else {
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double u = 1.0 - t;
    a.base = static_cast<int>(fl) - 1;
    a.w[0] = u * u * u / 6.0;
    a.w[1] = (3.0 * t3 - 6.0 * t2 + 4.0) / 6.0;
    a.w[2] = (-3.0 * t3 + 3.0 * t2 + 3.0 * t + 1.0) / 6.0;
    a.w[3] = t3 / 6.0;
    a.count = 4;
  }
  return a;
}

inline std::size_t resolve(long v, std::size_t n, Boundary bc) {
  const long nn = static_cast<long>(n);
  if (bc == Boundary::periodic) return static_cast<std::size_t>(((v % nn) + nn) % nn);
  if (v < 0) return 0;
  if (v >= nn) return n - 1;
  return static_cast<std::size_t>(v);
}

// Visits every row, dispatching interior rows to a precomputed-offset path.
template <class Fast, class Slow>
void for_each_row(const Extents& ext, int rx, int ry, int rz, Fast&& fast, Slow&& slow) {
  const long nx = static_cast<long>(ext.nx);
  const long ny = static_cast<long>(ext.ny);
  const long nz = static_cast<long>(ext.nz);
  for (long z = 0; z < nz; ++z) {
    const bool z_in = z >= rz && z + rz < nz;
    for (long y = 0; y < ny; ++y) {
      const bool yz_in = z_in && y >= ry && y + ry < ny;
      const std::size_t row = static_cast<std::size_t>((z * ny + y) * nx);
      if (yz_in && nx > 2 * rx) {
        for (long x = 0; x < rx; ++x) slow(x, y, z, row + static_cast<std::size_t>(x));
        for (long x = rx; x < nx - rx; ++x) fast(row + static_cast<std::size_t>(x));
        for (long x = nx - rx; x < nx; ++x) slow(x, y, z, row + static_cast<std::size_t>(x));
      } else {
        for (long x = 0; x < nx; ++x) slow(x, y, z, row + static_cast<std::size_t>(x));
      }
    }
  }
}

}  // namespace

CentralDifference::CentralDifference(const Eigen::Vector3d& displacement, double h,
                                     Interpolation interp, int dim) {
  if (!(h > 0.0)) throw ConfigError("central difference requires h > 0");
  std::map<std::tuple<int, int, int>, double> merged;
  for (int side : {+1, -1}) {
    const Eigen::Vector3d p = static_cast<double>(side) * displacement;
    const AxisWeights ax = axis_weights(p.x(), interp, dim >= 1);
    const AxisWeights ay = axis_weights(p.y(), interp, dim >= 2);
    const AxisWeights az = axis_weights(p.z(), interp, dim >= 3);
    const double scale = static_cast<double>(side) / (2.0 * h);
    for (int k = 0; k < az.count; ++k)
      for (int j = 0; j < ay.count; ++j)
        for (int i = 0; i < ax.count; ++i) {
          const double w = ax.w[i] * ay.w[j] * az.w[k];
          if (w == 0.0) continue;
          merged[{ax.base + i, ay.base + j, az.base + k}] += scale * w;
        }
  }
  for (const auto& [key, w] : merged) {
    if (w == 0.0) continue;
    const auto [dx, dy, dz] = key;
    taps_.push_back({dx, dy, dz, w});
    reach_x_ = std::max(reach_x_, std::abs(dx));
    reach_y_ = std::max(reach_y_, std::abs(dy));
    reach_z_ = std::max(reach_z_, std::abs(dz));
  }
}

void CentralDifference::gather(const Extents& ext, Boundary bc, std::span<const double> c,
                               std::span<double> out) const {
  std::vector<long> offsets(taps_.size());
  for (std::size_t t = 0; t < taps_.size(); ++t) {
    offsets[t] = (static_cast<long>(taps_[t].dz) * static_cast<long>(ext.ny) + taps_[t].dy) *
                     static_cast<long>(ext.nx) +
                 taps_[t].dx;
  }
  const std::size_t nt = taps_.size();
  for_each_row(
      ext, reach_x_, reach_y_, reach_z_,
      [&](std::size_t i) {
        double acc = 0.0;
        const long li = static_cast<long>(i);
        for (std::size_t t = 0; t < nt; ++t) acc += taps_[t].w * c[static_cast<std::size_t>(li + offsets[t])];
        out[i] = acc;
      },
      [&](long x, long y, long z, std::size_t i) {
        double acc = 0.0;
        for (const auto& tap : taps_) {
          const std::size_t xi = resolve(x + tap.dx, ext.nx, bc);
          const std::size_t yi = resolve(y + tap.dy, ext.ny, bc);
          const std::size_t zi = resolve(z + tap.dz, ext.nz, bc);
          acc += tap.w * c[(zi * ext.ny + yi) * ext.nx + xi];
        }
        out[i] = acc;
      });
}

void CentralDifference::scatter(const Extents& ext, Boundary bc, std::span<const double> v,
                                std::span<double> out) const {
  std::vector<long> offsets(taps_.size());
  for (std::size_t t = 0; t < taps_.size(); ++t) {
    offsets[t] = (static_cast<long>(taps_[t].dz) * static_cast<long>(ext.ny) + taps_[t].dy) *
                     static_cast<long>(ext.nx) +
                 taps_[t].dx;
  }
  const std::size_t nt = taps_.size();
  if (bc == Boundary::periodic) {
    // Wrapping makes each tap a bijection, so the transpose is a gather with
    // reflected taps; every sample then sums in the same order.
    for_each_row(
        ext, reach_x_, reach_y_, reach_z_,
        [&](std::size_t i) {
          double acc = 0.0;
          const long li = static_cast<long>(i);
          for (std::size_t t = 0; t < nt; ++t) acc += taps_[t].w * v[static_cast<std::size_t>(li - offsets[t])];
          out[i] += acc;
        },
        [&](long x, long y, long z, std::size_t i) {
          double acc = 0.0;
          for (const auto& tap : taps_) {
            const std::size_t xi = resolve(x - tap.dx, ext.nx, bc);
            const std::size_t yi = resolve(y - tap.dy, ext.ny, bc);
            const std::size_t zi = resolve(z - tap.dz, ext.nz, bc);
            acc += tap.w * v[(zi * ext.ny + yi) * ext.nx + xi];
          }
          out[i] += acc;
        });
    return;
  }
  for_each_row(
      ext, reach_x_, reach_y_, reach_z_,
      [&](std::size_t i) {
        const double vi = v[i];
        const long li = static_cast<long>(i);
        for (std::size_t t = 0; t < nt; ++t) out[static_cast<std::size_t>(li + offsets[t])] += taps_[t].w * vi;
      },
      [&](long x, long y, long z, std::size_t i) {
        const double vi = v[i];
        for (const auto& tap : taps_) {
          const std::size_t xi = resolve(x + tap.dx, ext.nx, bc);
          const std::size_t yi = resolve(y + tap.dy, ext.ny, bc);
          const std::size_t zi = resolve(z + tap.dz, ext.nz, bc);
          out[(zi * ext.ny + yi) * ext.nx + xi] += tap.w * vi;
        }
      });
}

namespace {

// Solves the cubic B-spline sampling system on one line, in place.
// Neumann: tridiagonal, ends (5/6, 1/6). Periodic: circulant (1/6, 4/6, 1/6).
void solve_line(std::vector<double>& d, Boundary bc, std::vector<double>& work) {
  const std::size_t n = d.size();
  constexpr double off = 1.0 / 6.0;
  constexpr double mid = 4.0 / 6.0;
  work.resize(2 * n);
  double* cp = work.data();
  double* z = work.data() + n;

  // Thomas algorithm with diagonal diag[i] and constant off-diagonals.
  auto thomas = [&](std::vector<double>& rhs, const auto& diag) {
    cp[0] = off / diag(0);
    rhs[0] /= diag(0);
    for (std::size_t i = 1; i < n; ++i) {
      const double m = diag(i) - off * cp[i - 1];
      cp[i] = off / m;
      rhs[i] = (rhs[i] - off * rhs[i - 1]) / m;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= cp[i] * rhs[i + 1];
  };

  if (bc == Boundary::neumann) {
    thomas(d, [&](std::size_t i) { return (i == 0 || i == n - 1) ? mid + off : mid; });
    return;
  }
  // Sherman-Morrison on the cyclic system: A = T + u vᵀ with u = (γ, 0.., off), v = (1, 0.., off/γ).
  const double gamma = -mid;
  auto diag = [&](std::size_t i) {
    if (i == 0) return mid - gamma;
    if (i == n - 1) return mid - off * off / gamma;
    return mid;
  };
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = off;
  thomas(d, diag);
  thomas(u, diag);
  for (std::size_t i = 0; i < n; ++i) z[i] = u[i];
  const double fact = (d[0] + off * d[n - 1] / gamma) / (1.0 + z[0] + off * z[n - 1] / gamma);
  for (std::size_t i = 0; i < n; ++i) d[i] -= fact * z[i];
}

}  // namespace

void bspline_prefilter(const Extents& ext, Boundary bc, std::span<double> data) {
  std::vector<double> line;
  std::vector<double> work;
  const std::size_t nx = ext.nx;
  const std::size_t ny = ext.ny;
  const std::size_t nz = ext.nz;
  auto run_axis = [&](std::size_t n, std::size_t stride, auto&& starts) {
    if (n < 2) return;
    line.resize(n);
    starts([&](std::size_t start) {
      for (std::size_t k = 0; k < n; ++k) line[k] = data[start + k * stride];
      solve_line(line, bc, work);
      for (std::size_t k = 0; k < n; ++k) data[start + k * stride] = line[k];
    });
  };
  run_axis(nx, 1, [&](auto&& f) {
    for (std::size_t z = 0; z < nz; ++z)
      for (std::size_t y = 0; y < ny; ++y) f((z * ny + y) * nx);
  });
  run_axis(ny, nx, [&](auto&& f) {
    for (std::size_t z = 0; z < nz; ++z)
      for (std::size_t x = 0; x < nx; ++x) f(z * ny * nx + x);
  });
  run_axis(nz, nx * ny, [&](auto&& f) {
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t x = 0; x < nx; ++x) f(y * nx + x);
  });
}

}  // namespace rtflow
