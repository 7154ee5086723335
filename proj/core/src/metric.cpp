#include "rtflow/metric.hpp"

#include <cmath>
#include <string>

#include "rtflow/errors.hpp"
#include "rtflow/sphere_grid.hpp"

namespace rtflow {

void MetricParams::validate() const {
  if (!(d_s > 0.0) || !std::isfinite(d_s)) throw ConfigError("ds must be positive, got " + std::to_string(d_s));
  if (!(d_a > 0.0) || !std::isfinite(d_a)) throw ConfigError("da must be positive, got " + std::to_string(d_a));
  if (!(frac >= 0.0 && frac <= 1.0)) throw ConfigError("frac must lie in [0, 1], got " + std::to_string(frac));
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw ConfigError("eps must be nonnegative, got " + std::to_string(eps));
}

Measure::Measure(const LiftedGrid& grid, const MetricParams& m) : spatial_size_(grid.spatial_size()) {
  m.validate();
  const double cell = std::pow(grid.h, grid.dim) / (m.d_s * m.d_a);
  per_orientation_.resize(grid.n_orient);
  for (std::size_t o = 0; o < grid.n_orient; ++o) {
    const double solid = grid.dim == 3 ? grid.sphere->weights()[o] : grid.h_a;
    per_orientation_[o] = cell * solid;
  }
  double sum = 0.0;
  for (double w : per_orientation_) sum += w;
  total_ = sum * static_cast<double>(spatial_size_);
}

namespace {

// Kahan summation of Σ_o w_o Σ_s f(o, s).
template <class F>
double weighted_sum(std::size_t n_orient, std::size_t spatial, std::span<const double> w, F&& f) {
  double sum = 0.0;
  double comp = 0.0;
  for (std::size_t o = 0; o < n_orient; ++o) {
    double inner = 0.0;
    double inner_comp = 0.0;
    const std::size_t base = o * spatial;
    for (std::size_t s = 0; s < spatial; ++s) {
      const double y = f(base + s) - inner_comp;
      const double t = inner + y;
      inner_comp = (t - inner) - y;
      inner = t;
    }
    const double y = w[o] * inner - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

}  // namespace

double Measure::integrate(const LiftedField& u) const {
  const auto v = u.values();
  return weighted_sum(per_orientation_.size(), spatial_size_, per_orientation_,
                      [&](std::size_t i) { return v[i]; });
}

double Measure::inner(const LiftedField& u, const LiftedField& v) const {
  const auto a = u.values();
  const auto b = v.values();
  if (a.size() != b.size()) throw ConfigError("inner product of fields with different shapes");
  return weighted_sum(per_orientation_.size(), spatial_size_, per_orientation_,
                      [&](std::size_t i) { return a[i] * b[i]; });
}

double Measure::norm(const LiftedField& u) const { return std::sqrt(inner(u, u)); }

double Measure::distance(const LiftedField& u, const LiftedField& v) const {
  const auto a = u.values();
  const auto b = v.values();
  if (a.size() != b.size()) throw ConfigError("distance between fields with different shapes");
  return std::sqrt(weighted_sum(per_orientation_.size(), spatial_size_, per_orientation_,
                                [&](std::size_t i) {
                                  const double d = a[i] - b[i];
                                  return d * d;
                                }));
}

}  // namespace rtflow
