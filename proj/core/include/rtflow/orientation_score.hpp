#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "rtflow/flow.hpp"
#include "rtflow/image.hpp"
#include "rtflow/lifted_field.hpp"
#include "rtflow/metric.hpp"

namespace rtflow {

struct CakeParams {
  std::size_t n_orientations = 16;
  std::size_t size = 33;
  int spline_order = 3;
  /// Inflection point of the radial window, as a fraction of Nyquist.
  double inflection = 1.0;
  /// Upper edge of the pass band, as a fraction of Nyquist. The window
  /// order is the smallest one keeping the window within 0.0025 of 1 there.
  double nyquist_cut = 0.8;
};

/// Cake wavelets on a size x size frequency grid.
///
/// Piece n covers the angular sector centred at θ_n + π/2 (so the spatial
/// kernel is elongated along θ_n = 2πn/N), with a B-spline profile in
/// angle and a shared radial window. The zero frequency is split evenly,
/// 1/N per piece, so Σ_n ψ̂_n equals the radial window everywhere.
class WaveletStack {
 public:
  explicit WaveletStack(const CakeParams& p);

  const CakeParams& params() const { return params_; }
  std::size_t n_orientations() const { return params_.n_orientations; }
  std::size_t size() const { return params_.size; }
  int radial_order() const { return radial_order_; }
  double h_a() const;

  /// ψ̂_n on the frequency grid, centred layout: entry (ky + r) * size + (kx + r)
  /// with r = (size - 1) / 2.
  const std::vector<double>& frequency(std::size_t n) const { return frequency_[n]; }
  /// Spatial kernel ψ_n, centred layout as above.
  const std::vector<std::complex<double>>& kernel(std::size_t n) const { return kernels_[n]; }
  /// Σ_n ψ̂_n on the frequency grid.
  const std::vector<double>& frequency_cover() const { return cover_; }

  /// Radial window at ρ (fraction of Nyquist).
  double radial_window(double rho) const;
  /// Angular profile of piece n at polar angle φ.
  double angular_profile(std::size_t n, double phi) const;

  /// max |Σ_n ψ̂_n - 1| over frequency samples with ρ in [lo, hi] (fraction of Nyquist).
  double admissibility_deviation(double lo = 0.1, double hi = 0.8) const;
  /// Same measure for the kernels zero-padded into an nx x ny image grid.
  double admissibility_deviation_on_grid(std::size_t nx, std::size_t ny, double lo = 0.1,
                                         double hi = 0.8) const;

  /// Real parts of the spatial kernels as a size x size x N field, for inspection.
  LiftedField kernels_as_field() const;

 private:
  CakeParams params_;
  int radial_order_ = 0;
  double window_scale_ = 0.0;
  std::vector<std::vector<double>> frequency_;
  std::vector<std::vector<std::complex<double>>> kernels_;
  std::vector<double> cover_;
};

/// Throws ConfigError unless N ≥ 4 is even, size ≥ 3 is odd, the spline
/// order lies in [1, 5] and fits the sector count, and 0 < nyquist_cut < inflection.
WaveletStack build_cake_wavelets(const CakeParams& p);

/// Orientation score density: U(·, θ_n) = Re(ψ_n ⋆ f) / h_a, with periodic
/// correlation. The image must be at least as large as the kernels.
LiftedField lift(const Image& f, const WaveletStack& w, Boundary boundary = Boundary::neumann);

/// Σ_n U(·, θ_n) h_a; inverts lift on the admissible band.
Image reconstruct(const LiftedField& u, const WaveletStack& w);

/// reconstruct(run(lift(f)).final)
Image enhance(const Image& f, const WaveletStack& w, const FlowSpec& spec, const MetricParams& m,
              Boundary boundary = Boundary::neumann);

}  // namespace rtflow
