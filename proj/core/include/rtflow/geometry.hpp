#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "rtflow/lifted_field.hpp"
#include "rtflow/metric.hpp"
#include "rtflow/spatial_stencil.hpp"

namespace rtflow {

/// Vector field on the lifted grid, in world coordinates.
///
/// spatial: dim components per sample; angular: one component (∂θ) per
/// sample for d=2, a 3-vector orthogonal to n for d=3. Sample-major layout.
struct TangentField {
  LiftedGrid grid;
  std::vector<double> spatial;
  std::vector<double> angular;

  TangentField() = default;
  explicit TangentField(LiftedGrid g);

  std::size_t spatial_components() const { return static_cast<std::size_t>(grid.dim); }
  std::size_t angular_components() const { return grid.dim == 2 ? 1 : 3; }
};

/// Derivatives of a field in the moving frame (n, e_1[, e_2], angular),
/// i.e. the components of dU. Structure-of-arrays, one entry per sample.
///
/// `across` is populated only when the metric is Riemannian (frac > 0).
/// `angular` holds ∂θ in angular[0] for d=2 and the tangent vector (x,y,z)
/// for d=3.
struct FrameComponents {
  std::vector<double> along;
  std::array<std::vector<double>, 2> across;
  std::array<std::vector<double>, 3> angular;
  bool with_across = false;

  void resize(const LiftedGrid& grid, bool across_components);
};

/// Discrete gradient / divergence pair on a fixed grid.
///
/// The derivative operator D maps U to frame components of dU; the
/// gradient is 𝒢⁻¹D U and the divergence of a field v is -W⁻¹DᵀW applied
/// to the frame components of v, so that ⟨U, div v⟩_μ = -⟨∇U, v⟩_{𝒢,μ}
/// holds exactly for every v.
class GeometryOperators {
 public:
  explicit GeometryOperators(LiftedGrid grid, Interpolation interp = Interpolation::linear);

  const LiftedGrid& grid() const { return grid_; }
  Interpolation interpolation() const { return interp_; }

  /// Frame components of dU. `across` is filled when with_across is set.
  void derivatives(std::span<const double> u, bool with_across, FrameComponents& out) const;

  /// out = W⁻¹ Dᵀ W c, the negative divergence of frame components c.
  void derivatives_adjoint(const FrameComponents& c, std::span<double> out) const;

  /// ∇U = (D_S n ∂_n U + frac² D_S Σ e_k ∂_k U, D_A ∇_S U)
  TangentField gradient(const LiftedField& u, const MetricParams& m) const;
  LiftedField divergence(const TangentField& v, const MetricParams& m) const;
  /// Pointwise sqrt(𝒢(v, v)); in sub-Riemannian mode the component of the
  /// spatial part orthogonal to n is ignored.
  LiftedField grad_norm(const TangentField& v, const MetricParams& m) const;

  /// Pointwise ‖∇U‖² computed directly from frame components.
  void squared_norm(const FrameComponents& c, const MetricParams& m, std::span<double> out) const;

  /// Integrand sqrt(‖∇U‖² + ε²) per sample.
  LiftedField tv_density(const LiftedField& u, const MetricParams& m) const;
  double tv_epsilon(const LiftedField& u, const MetricParams& m) const;

  /// ⟨u, v⟩_{𝒢,μ} for tangent fields.
  double metric_inner(const TangentField& u, const TangentField& v, const MetricParams& m) const;

  /// Orthonormal complement of orientation o (d-1 vectors).
  std::span<const Eigen::Vector3d> across_directions(std::size_t o) const;

 private:
  void to_frame(const TangentField& v, bool with_across, FrameComponents& out) const;
  void check_shape(const LiftedGrid& g) const;
  Extents extents() const { return {grid_.nx, grid_.ny, grid_.nz}; }

  LiftedGrid grid_;
  Interpolation interp_;
  std::vector<Eigen::Vector3d> normals_;
  std::vector<std::array<Eigen::Vector3d, 2>> across_;
  std::vector<CentralDifference> along_ops_;
  std::vector<CentralDifference> across_ops_;  // dim-1 per orientation
};

// Free-function forms; each builds a GeometryOperators for u's grid.
TangentField gradient(const LiftedField& u, const MetricParams& m,
                      Interpolation interp = Interpolation::linear);
LiftedField divergence(const TangentField& v, const MetricParams& m,
                       Interpolation interp = Interpolation::linear);
LiftedField grad_norm(const TangentField& v, const MetricParams& m);
double tv_epsilon(const LiftedField& u, const MetricParams& m,
                  Interpolation interp = Interpolation::linear);

/// Kahan-compensated Σ w_o Σ_s f.
double integrate(const LiftedField& f, const Measure& mu);

}  // namespace rtflow
