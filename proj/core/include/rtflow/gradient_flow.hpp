#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rtflow/lifted_field.hpp"
#include "rtflow/metric.hpp"
#include "rtflow/spatial_stencil.hpp"

namespace rtflow {

/// Oracle work is restricted to small grids.
inline constexpr std::size_t kOracleSampleLimit = 4096;

struct ProxProblem {
  LiftedField u0;
  double tau = 0.0;
  MetricParams m;  // m.eps > 0
  double tol = 1e-8;
  std::size_t max_iter = 200000;
  Interpolation interp = Interpolation::linear;
  /// Upper bound on the spectrum of -div∇; computed when left at 0.
  double spectral_bound = 0.0;
};

struct ProxResult {
  LiftedField u;
  /// ‖u - u0 + τ grad TV_ε(u)‖_μ, the first-order optimality residual.
  double residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// H-gradient of TV_ε in H = L²(μ): -div(∇u / sqrt(‖∇u‖² + ε²)).
LiftedField tv_gradient(const LiftedField& u, const MetricParams& m,
                        Interpolation interp = Interpolation::linear);

/// Upper estimate of the largest eigenvalue of -div∇ on the grid
/// (power iteration with a 20% margin).
double laplacian_spectral_bound(const LiftedGrid& grid, const MetricParams& m,
                                Interpolation interp = Interpolation::linear);

/// argmin_u 1/(2τ)‖u - u0‖² + TV_ε(u), by Nesterov's method for strongly
/// convex objectives. Stops once residual ≤ tol·‖u0‖_μ; a result with
/// converged == false carries the last residual.
ProxResult prox_tv(const ProxProblem& p);

/// Φ(u) = 1/(2τ)‖u - u0‖² + TV_ε(u)
double prox_objective(const LiftedField& u, const ProxProblem& p);

struct MovementResult {
  LiftedField u;
  std::size_t steps = 0;
  /// Σ of prox residuals; bounds the distance to the exact iterates.
  double residual_sum = 0.0;
  std::size_t prox_iterations = 0;
  bool converged = true;
};

/// (J_{t/n})ⁿ[u0] for TV_ε with ε = m.eps.
MovementResult minimizing_movement(const LiftedField& u0, double t, std::size_t n, const MetricParams& m,
                                   double tol = 1e-8, Interpolation interp = Interpolation::linear);

struct OracleOptions {
  double prox_tol = 1e-8;
  /// n is chosen so the a priori oracle error is at most this fraction of the bound.
  double oracle_fraction = 0.01;
  std::size_t max_steps = 20000;
  Interpolation interp = Interpolation::linear;
};

struct BoundCheckReport {
  std::string check;
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  /// rhs - lhs - oracle_error
  double margin = 0.0;
  double oracle_error = 0.0;
  bool applicable = true;
  /// Named inputs (E, M, delta, L, n, ...), in insertion order.
  std::vector<std::pair<std::string, double>> inputs;

  bool passed() const { return !applicable || margin >= 0.0; }
  double input(const std::string& key) const;
  /// One line of space-separated key=value pairs.
  std::string to_record() const;
};

/// ‖W^{ε₁}(t) - W^{ε₂}(t)‖ against the sum of the two ε-vs-limit bounds
/// 8(‖U‖(TV₀(U) + δᵢ)δᵢt²)^{1/5}, δᵢ = εᵢ μ(Ω). m.eps is ignored.
BoundCheckReport check_theorem1(const LiftedField& u, std::pair<double, double> eps_pair, double t,
                                const MetricParams& m, const OracleOptions& opt = {});

struct Theorem2Setup {
  LiftedField u0;
  LiftedField v0;
  double eps_f = 0.0;
  double eps_g = 0.0;
  double t = 0.0;
  MetricParams m;  // eps ignored
};

/// ‖u(t) - v(t)‖ ≤ 16(MEδt²)^{1/5} + ‖u0 - v0‖ for F = TV_{ε_f}, G = TV_{ε_g}.
/// E = max(F(u0), G(v0)), M = max distance to the mean-value constants,
/// δ = |ε_f - ε_g| μ(Ω). Marked inapplicable unless t < E⁶M⁶/δ⁹.
BoundCheckReport check_theorem2(const Theorem2Setup& s, const OracleOptions& opt = {});

struct PropositionBound {
  double value = 0.0;
  bool short_time = true;  // t ≤ δ/L²
  double short_branch = 0.0;
  double long_branch = 0.0;
};

/// 4√(δt) + gap for t ≤ δ/L², else 8∛(Lδt²) + gap; both branches reported.
PropositionBound proposition_bound(double delta, double slope, double t, double initial_gap);

/// Proposition bound for the pair of flows of a Theorem 2 setup, with
/// L = max slope of the two energies at the initial data. Reuses lhs and
/// the oracle error of the matching Theorem 2 report.
BoundCheckReport check_proposition(const Theorem2Setup& s, const BoundCheckReport& theorem2);

struct LemmaProbeOptions {
  std::size_t probes = 20;
  /// Probes are u* + uniform noise in [-amplitude, amplitude).
  double amplitude = 0.5;
  std::uint64_t seed = 1;
  /// Allowed excess of 1/(2τ)‖u - u*‖² over Φ(u) - Φ(u*).
  double slack = 1e-8;
  /// Relative prox tolerance for u*. The inexact minimizer shifts the
  /// comparison by about ‖∇Φ(u*)‖·‖u - u*‖, so this must be far below slack.
  double prox_tol = 1e-13;
  Interpolation interp = Interpolation::linear;
};

/// Worst value of 1/(2τ)‖u - u*‖² - (Φ(u) - Φ(u*)) over random probes u,
/// with u* = J_τ[u0] for TV_ε (ε = m.eps). lhs is that worst value, rhs the slack.
BoundCheckReport check_lemma(const LiftedField& u0, double tau, const MetricParams& m,
                             const LemmaProbeOptions& opt = {});

/// ∫u dμ / μ(Ω)
double mean_value(const LiftedField& u, const MetricParams& m);

}  // namespace rtflow
