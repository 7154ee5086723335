#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace rtflow {

/// Icosahedral sampling of S² with ring-1 neighbor stencils.
///
/// The angular gradient at vertex i averages the flat linear-interpolant
/// gradients of the incident chordal triangles, weighted by a third of their
/// spherical area over w_i and projected onto the tangent plane at n_i. It
/// is stored as a linear stencil
///   grad f(i) = Σ_j a_ij (f_j - f_i),   a_ij ⊥ n_i,
/// and the divergence is its negative adjoint under Σ_i w_i ⟨·,·⟩.
class SphereSampling {
 public:
  static constexpr int max_subdivision = 6;

  /// Regular icosahedron refined `subdiv` times by edge-midpoint splitting.
  static SphereSampling icosphere(int subdiv);

  std::size_t size() const { return vertices_.size(); }
  int subdivision() const { return subdiv_; }
  const std::vector<Eigen::Vector3d>& vertices() const { return vertices_; }
  const Eigen::Vector3d& vertex(std::size_t i) const { return vertices_[i]; }
  const std::vector<std::array<int, 3>>& faces() const { return faces_; }
  /// Solid-angle weights, one third of incident spherical triangle areas.
  const std::vector<double>& weights() const { return weights_; }
  /// Mean geodesic edge length (radians).
  double h_a() const { return h_a_; }
  std::size_t edge_count() const;

  std::span<const int> neighbors(std::size_t i) const;
  /// Stencil coefficients a_ij, aligned with neighbors(i).
  std::span<const Eigen::Vector3d> gradient_coefficients(std::size_t i) const;
  /// Σ_j a_ij
  const Eigen::Vector3d& gradient_center(std::size_t i) const { return center_[i]; }

  /// Adjoint stencil at vertex k: entries (i, w_i a_ik / w_k) for i ∈ neighbors(k).
  struct AdjointTap {
    int vertex;
    Eigen::Vector3d coeff;
  };
  std::span<const AdjointTap> adjoint_taps(std::size_t k) const;

  /// Index of -n_i, or -1 when the sampling is not antipodally closed there.
  int antipode(std::size_t i) const { return antipode_[i]; }
  bool antipodally_closed() const;

  /// Vertex nearest to a unit direction.
  std::size_t nearest_vertex(const Eigen::Vector3d& direction) const;

 private:
  void build_topology();
  void build_weights();
  void build_stencils();
  void build_antipodes();

  int subdiv_ = 0;
  std::vector<Eigen::Vector3d> vertices_;
  std::vector<std::array<int, 3>> faces_;
  std::vector<double> weights_;
  double h_a_ = 0.0;

  std::vector<std::size_t> offsets_;  // CSR over neighbors
  std::vector<int> adjacency_;
  std::vector<Eigen::Vector3d> coeffs_;
  std::vector<Eigen::Vector3d> center_;
  std::vector<AdjointTap> adjoint_;
  std::vector<int> antipode_;
};

/// Shared immutable icosphere, built once per level and cached; rejects
/// subdiv outside [0, 6] with ConfigError.
std::shared_ptr<const SphereSampling> build_icosphere(int subdiv);

/// Tangent-plane gradient of a per-vertex function.
std::vector<Eigen::Vector3d> spherical_gradient(std::span<const double> f, const SphereSampling& s);

/// Negative weighted adjoint of spherical_gradient. Rejects inputs with
/// |v_i · n_i| above 1e-10 (1 + |v_i|) with ConfigError.
std::vector<double> spherical_divergence(std::span<const Eigen::Vector3d> v,
                                         const SphereSampling& s);

/// One line per vertex: "index x y z weight".
void write_sampling_text(std::ostream& os, const SphereSampling& s);

}  // namespace rtflow
