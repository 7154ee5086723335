#pragma once

#include <span>
#include <vector>

#include "rtflow/lifted_field.hpp"

namespace rtflow {

/// Geometry and regularization knobs of the flows.
///
/// d_s and d_a weight spatial and angular motion, frac is the anisotropy
/// (0 selects the sub-Riemannian gradient, spatial motion only along the
/// orientation), eps regularizes the total variation.
struct MetricParams {
  double d_s = 1.0;
  double d_a = 1.0;
  double frac = 0.0;
  double eps = 0.0;

  void validate() const;
  bool sub_riemannian() const { return frac == 0.0; }
};

/// Quadrature weights of dμ = D_S⁻¹dx ∧ D_A⁻¹dσ, one weight per orientation
/// (all spatial samples of an orientation slice share it).
class Measure {
 public:
  Measure(const LiftedGrid& grid, const MetricParams& m);

  double weight(std::size_t orientation) const { return per_orientation_[orientation]; }
  std::span<const double> per_orientation() const { return per_orientation_; }
  /// μ(Ω) = Σ weights.
  double total() const { return total_; }

  /// ∫ u dμ
  double integrate(const LiftedField& u) const;
  /// ⟨u, v⟩_μ
  double inner(const LiftedField& u, const LiftedField& v) const;
  /// ‖u‖_{L²(μ)}
  double norm(const LiftedField& u) const;
  /// ‖u - v‖_{L²(μ)}
  double distance(const LiftedField& u, const LiftedField& v) const;

 private:
  std::size_t spatial_size_ = 0;
  std::vector<double> per_orientation_;
  double total_ = 0.0;
};

}  // namespace rtflow
