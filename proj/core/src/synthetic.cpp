#include "rtflow/synthetic.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Geometry>

#include "rtflow/errors.hpp"

namespace rtflow {

namespace {

constexpr double kPi = std::numbers::pi;

double segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

}  // namespace

Image crossing_curves_image(std::size_t n, double width) {
  if (n < 8) throw ConfigError("crossing curves need n >= 8");
  const double c = 0.5 * static_cast<double>(n - 1);
  std::vector<Eigen::Vector2d> spiral;
  const double turns = 2.5;
  const double r_max = 0.42 * static_cast<double>(n);
  const int samples = 2000;
  for (int k = 0; k <= samples; ++k) {
    const double s = static_cast<double>(k) / samples;
    const double theta = 2.0 * kPi * turns * s;
    const double r = 0.08 * static_cast<double>(n) + (r_max - 0.08 * static_cast<double>(n)) * s;
    spiral.emplace_back(c + r * std::cos(theta), c + r * std::sin(theta));
  }
  const Eigen::Vector2d la(0.05 * static_cast<double>(n), 0.15 * static_cast<double>(n));
  const Eigen::Vector2d lb(0.95 * static_cast<double>(n), 0.85 * static_cast<double>(n));

  Image f(n, n);
  const double inv = 1.0 / (2.0 * width * width);
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t x = 0; x < n; ++x) {
      const Eigen::Vector2d p(static_cast<double>(x), static_cast<double>(y));
      double d = segment_distance(p, la, lb);
      for (std::size_t k = 0; k + 1 < spiral.size(); ++k) d = std::min(d, segment_distance(p, spiral[k], spiral[k + 1]));
      f.at(x, y) = std::exp(-d * d * inv);
    }
  return f;
}

Image band_limited_image(std::size_t nx, std::size_t ny, double rho_max, std::uint64_t seed) {
  if (nx < 2 || ny < 2) throw ConfigError("band-limited image needs extents >= 2");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nx * ny));
  auto* data = reinterpret_cast<std::complex<double>*>(buf);
  for (std::size_t ky = 0; ky < ny; ++ky)
    for (std::size_t kx = 0; kx < nx; ++kx) {
      const double fx = 2.0 * static_cast<double>(kx <= nx / 2 ? static_cast<long>(kx) : static_cast<long>(kx) - static_cast<long>(nx)) /
                        static_cast<double>(nx);
      const double fy = 2.0 * static_cast<double>(ky <= ny / 2 ? static_cast<long>(ky) : static_cast<long>(ky) - static_cast<long>(ny)) /
                        static_cast<double>(ny);
      const double rho = std::hypot(fx, fy);
      const double re = normal(rng);
      const double im = normal(rng);
      data[ky * nx + kx] = (rho > 0.0 && rho <= rho_max) ? std::complex<double>(re, im) : 0.0;
    }
  fftw_plan plan = fftw_plan_dft_2d(static_cast<int>(ny), static_cast<int>(nx), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  Image f(nx, ny);
  double sq = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.data[i] = data[i].real();
    sq += f.data[i] * f.data[i];
  }
  fftw_free(buf);
  const double rms = std::sqrt(sq / static_cast<double>(f.size()));
  if (rms > 0.0)
    for (double& v : f.data) v /= rms;
  return f;
}

void add_gaussian_noise(std::span<double> data, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw ConfigError("noise sigma must be nonnegative");
  if (sigma == 0.0) return;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  for (double& v : data) v += normal(rng);
}

LiftedField random_field(const LiftedGrid& grid, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(lo, hi);
  LiftedField u(grid);
  for (double& v : u.values()) v = uni(rng);
  return u;
}

Image pad_reflect(const Image& f, std::size_t pad) {
  if (pad == 0) return f;
  Image out(f.nx + 2 * pad, f.ny + 2 * pad);
  auto mirror = [](long i, std::size_t n) {
    const long nn = static_cast<long>(n);
    const long period = 2 * nn;
    long m = ((i % period) + period) % period;
    if (m >= nn) m = period - 1 - m;
    return static_cast<std::size_t>(m);
  };
  for (std::size_t y = 0; y < out.ny; ++y)
    for (std::size_t x = 0; x < out.nx; ++x) {
      out.at(x, y) = f.at(mirror(static_cast<long>(x) - static_cast<long>(pad), f.nx),
                          mirror(static_cast<long>(y) - static_cast<long>(pad), f.ny));
    }
  return out;
}

Image crop(const Image& f, std::size_t pad) {
  if (pad == 0) return f;
  if (f.nx <= 2 * pad || f.ny <= 2 * pad) throw ConfigError("crop exceeds image extents");
  Image out(f.nx - 2 * pad, f.ny - 2 * pad);
  for (std::size_t y = 0; y < out.ny; ++y)
    for (std::size_t x = 0; x < out.nx; ++x) out.at(x, y) = f.at(x + pad, y + pad);
  return out;
}

LiftedField crossing_bars_field(std::size_t n, std::size_t n_theta, double angle_deg, double radius, double kappa) {
  LiftedField u(LiftedGrid::planar(n, n, n_theta));
  const double c = 0.5 * static_cast<double>(n - 1);
  const double bar_angles[2] = {0.0, angle_deg * kPi / 180.0};
  for (double phi : bar_angles) {
    const Eigen::Vector2d d(std::cos(phi), std::sin(phi));
    for (std::size_t y = 0; y < n; ++y)
      for (std::size_t x = 0; x < n; ++x) {
        const Eigen::Vector2d p(static_cast<double>(x) - c, static_cast<double>(y) - c);
        const double dist = std::abs(p.x() * d.y() - p.y() * d.x());
        if (dist > radius) continue;
        for (std::size_t o = 0; o < n_theta; ++o) {
          const double cs = std::cos(u.grid().h_a * static_cast<double>(o) - phi);
          u.at(x, y, 0, o) += std::exp(kappa * (cs * cs - 1.0));
        }
      }
  }
  return u;
}

BundlePhantom two_bundle_phantom(std::size_t n, std::shared_ptr<const SphereSampling> sphere, double angle_deg,
                                 double radius, double kappa) {
  if (!sphere) throw ConfigError("phantom needs a sphere sampling");
  const double a = angle_deg * kPi / 180.0;
  BundlePhantom ph{LiftedField(LiftedGrid::spatial(n, n, n, sphere)), Eigen::Vector3d(1.0, 0.0, 0.0),
                   Eigen::Vector3d(std::cos(a), std::sin(a), 0.0)};
  const double c = 0.5 * static_cast<double>(n - 1);
  for (const Eigen::Vector3d& d : {ph.dir1, ph.dir2}) {
    for (std::size_t z = 0; z < n; ++z)
      for (std::size_t y = 0; y < n; ++y)
        for (std::size_t x = 0; x < n; ++x) {
          const Eigen::Vector3d p(static_cast<double>(x) - c, static_cast<double>(y) - c, static_cast<double>(z) - c);
          if (p.cross(d).norm() > radius) continue;
          for (std::size_t o = 0; o < sphere->size(); ++o) {
            const double cs = sphere->vertex(o).dot(d);
            ph.field.at(x, y, z, o) += std::exp(kappa * (cs * cs - 1.0));
          }
        }
  }
  return ph;
}

}  // namespace rtflow
