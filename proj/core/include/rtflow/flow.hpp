#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rtflow/geometry.hpp"
#include "rtflow/lifted_field.hpp"
#include "rtflow/metric.hpp"

namespace rtflow {

/// Instances of W_t = (‖∇W‖² + ε²)^{a/2} div(∇W / (‖∇W‖² + ε²)^{b/2}).
enum class FlowVariant {
  diffusion,     // (a, b) = (0, 0)
  tvf,           // (0, 1)
  mcf,           // (1, 1)
  perona_malik,  // div(g(‖∇W‖/K) ∇W), g(s) = 1/(1+s²)
};

std::string_view to_string(FlowVariant v);
FlowVariant parse_flow_variant(std::string_view name);
/// Variant for PDE exponents (a, b); throws ConfigError for (1, 0).
FlowVariant variant_from_exponents(int a, int b);

/// Per-sample hook on the flux frame components (along, across, angular)
/// before the divergence is taken. Lets a locally adaptive frame or a
/// per-sample conductivity plug into the flows.
using FluxHook = std::function<void(std::size_t sample, FrameComponents& flux)>;

struct FlowSpec {
  FlowVariant variant = FlowVariant::diffusion;
  double pm_k = 0.2;
  double dt = 0.0;
  double t_end = 0.0;
  std::vector<double> snapshot_times;
  std::size_t trace_stride = 1;
  Interpolation interp = Interpolation::linear;
  /// Optional; called for every sample on every right-hand-side evaluation.
  FluxHook flux_hook;

  int a() const;
  int b() const;
  /// Number of explicit steps: floor(t_end / dt) with a 1e-9 relative tolerance.
  std::size_t step_count() const;
  /// Throws ConfigError if snapshot times or scalars are inconsistent.
  void validate() const;
};

/// Gershgorin bound for explicit diffusion with linear interpolation:
/// ( ((d-1)D_A + D_S)/(2h²) + (d-1)D_A/(2h_a²) )⁻¹.
double dt_critical(const MetricParams& m, int d, double h, double h_a);

/// Largest admissible step: safety · dt_critical, times ε for TVF.
double stable_dt(FlowVariant variant, const MetricParams& m, const LiftedGrid& grid,
                 double safety = 0.9);

struct Snapshot {
  double time = 0.0;
  std::size_t step = 0;
  LiftedField field;
};

struct TracePoint {
  double time = 0.0;
  double value = 0.0;
};

/// Snapshots are taken exactly at spec.snapshot_times (each rounded down to
/// a completed step); with no requested times the final state is the only
/// snapshot.
struct FlowTrajectory {
  std::vector<Snapshot> snapshots;
  std::vector<TracePoint> energy_trace;  // TV_ε
  std::vector<TracePoint> mass_trace;    // ∫W dμ
  std::size_t steps = 0;
  LiftedField final_state;

  const LiftedField& final_field() const { return final_state; }
};

/// Explicit-Euler integrator for one (grid, metric, spec) triple.
///
/// Holds scratch buffers; use one engine per thread.
class FlowEngine {
 public:
  FlowEngine(const LiftedGrid& grid, const MetricParams& m, FlowSpec spec);

  const FlowSpec& spec() const { return spec_; }
  const MetricParams& metric() const { return m_; }
  const GeometryOperators& operators() const { return ops_; }

  void rhs(std::span<const double> w, std::span<double> out) const;
  LiftedField rhs(const LiftedField& w) const;

  /// w ← w + dt·rhs(w). Throws NumericalError on a non-finite result.
  void step_in_place(LiftedField& w) const;
  LiftedField step(const LiftedField& w) const;

  /// Checks the stability bound, then integrates from u to t_end.
  FlowTrajectory run(const LiftedField& u) const;

 private:
  LiftedGrid grid_;
  MetricParams m_;
  FlowSpec spec_;
  GeometryOperators ops_;
  Measure measure_;
  mutable FrameComponents frame_;
  mutable std::vector<double> norm2_;
  mutable std::vector<double> scratch_;
};

// Free-function forms.
LiftedField rhs(const LiftedField& w, const FlowSpec& spec, const MetricParams& m);
LiftedField step(const LiftedField& w, const FlowSpec& spec, const MetricParams& m);
FlowTrajectory run(const LiftedField& u, const FlowSpec& spec, const MetricParams& m);

/// Throws ConfigError when spec.dt exceeds stable_dt (with 1e-12 relative slack).
void check_step_size(const FlowSpec& spec, const MetricParams& m, const LiftedGrid& grid);

}  // namespace rtflow
