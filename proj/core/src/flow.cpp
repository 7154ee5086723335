#include "rtflow/flow.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "rtflow/errors.hpp"

namespace rtflow {

namespace {

constexpr double kStepTolerance = 1e-9;

std::size_t steps_until(double t, double dt) {
  if (t <= 0.0) return 0;
  return static_cast<std::size_t>(std::floor(t / dt * (1.0 + kStepTolerance)));
}

}  // namespace

std::string_view to_string(FlowVariant v) {
  switch (v) {
    case FlowVariant::diffusion: return "diffusion";
    case FlowVariant::tvf: return "tvf";
    case FlowVariant::mcf: return "mcf";
    case FlowVariant::perona_malik: return "pm";
  }
  return "unknown";
}

FlowVariant parse_flow_variant(std::string_view name) {
  if (name == "diffusion") return FlowVariant::diffusion;
  if (name == "tvf") return FlowVariant::tvf;
  if (name == "mcf") return FlowVariant::mcf;
  if (name == "pm" || name == "perona_malik") return FlowVariant::perona_malik;
  throw ConfigError("unknown flow variant '" + std::string(name) + "' (expected diffusion, tvf, mcf or pm)");
}

FlowVariant variant_from_exponents(int a, int b) {
  if (a == 0 && b == 0) return FlowVariant::diffusion;
  if (a == 0 && b == 1) return FlowVariant::tvf;
  if (a == 1 && b == 1) return FlowVariant::mcf;
  throw ConfigError("no flow variant for exponents (a, b) = (" + std::to_string(a) + ", " + std::to_string(b) + ")");
}

int FlowSpec::a() const { return variant == FlowVariant::mcf ? 1 : 0; }
int FlowSpec::b() const { return (variant == FlowVariant::tvf || variant == FlowVariant::mcf) ? 1 : 0; }

std::size_t FlowSpec::step_count() const { return steps_until(t_end, dt); }

void FlowSpec::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive, got " + std::to_string(dt));
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be nonnegative, got " + std::to_string(t_end));
  if (variant == FlowVariant::perona_malik && !(pm_k > 0.0)) {
    throw ConfigError("pm_k must be positive, got " + std::to_string(pm_k));
  }
  if (trace_stride == 0) throw ConfigError("trace_stride must be at least 1");
  double prev = 0.0;
  for (double t : snapshot_times) {
    if (!(t >= 0.0 && t <= t_end)) {
      throw ConfigError("snapshot time " + std::to_string(t) + " lies outside [0, t_end]");
    }
    if (t < prev) throw ConfigError("snapshot times must be non-decreasing");
    prev = t;
  }
}

double dt_critical(const MetricParams& m, int d, double h, double h_a) {
  if (!(h > 0.0) || !(h_a > 0.0)) throw ConfigError("dt_critical requires h > 0 and h_a > 0");
  const double dm1 = static_cast<double>(d - 1);
  const double rate = (dm1 * m.d_a + m.d_s) / (2.0 * h * h) + dm1 * m.d_a / (2.0 * h_a * h_a);
  return 1.0 / rate;
}

double stable_dt(FlowVariant variant, const MetricParams& m, const LiftedGrid& grid, double safety) {
  m.validate();
  double dt = safety * dt_critical(m, grid.dim, grid.h, grid.h_a);
  if (variant == FlowVariant::tvf) {
    if (!(m.eps > 0.0)) throw ConfigError("tvf requires eps > 0");
    dt *= m.eps;
  }
  return dt;
}

void check_step_size(const FlowSpec& spec, const MetricParams& m, const LiftedGrid& grid) {
  const double limit = stable_dt(spec.variant, m, grid);
  if (spec.dt > limit * (1.0 + 1e-12)) {
    std::ostringstream os;
    os.precision(10);
    os << "dt = " << spec.dt << " exceeds the stable step " << limit << " for " << to_string(spec.variant);
    throw ConfigError(os.str());
  }
}

FlowEngine::FlowEngine(const LiftedGrid& grid, const MetricParams& m, FlowSpec spec)
    : grid_(grid), m_(m), spec_(std::move(spec)), ops_(grid, spec_.interp), measure_(grid, m) {
  m_.validate();
  if ((spec_.variant == FlowVariant::tvf || spec_.variant == FlowVariant::mcf) && !(m_.eps > 0.0)) {
    throw ConfigError(std::string(to_string(spec_.variant)) + " requires eps > 0");
  }
  if (spec_.variant == FlowVariant::perona_malik && !(spec_.pm_k > 0.0)) {
    throw ConfigError("pm_k must be positive");
  }
}

void FlowEngine::rhs(std::span<const double> w, std::span<double> out) const {
  const std::size_t n = grid_.size();
  if (w.size() != n || out.size() != n) throw ConfigError("field size does not match the flow grid");
  const bool with_across = !m_.sub_riemannian();
  ops_.derivatives(w, with_across, frame_);
  norm2_.resize(n);
  ops_.squared_norm(frame_, m_, norm2_);

  const double e2 = m_.eps * m_.eps;
  const double across_scale = m_.frac * m_.frac * m_.d_s;
  const std::size_t n_across = with_across ? static_cast<std::size_t>(grid_.dim - 1) : 0;
  for (std::size_t i = 0; i < n; ++i) {
    double f = 1.0;
    switch (spec_.variant) {
      case FlowVariant::diffusion: break;
      case FlowVariant::tvf:
      case FlowVariant::mcf: f = 1.0 / std::sqrt(norm2_[i] + e2); break;
      case FlowVariant::perona_malik: {
        const double r2 = norm2_[i] / (spec_.pm_k * spec_.pm_k);
        f = 1.0 / (1.0 + r2);
        break;
      }
    }
    frame_.along[i] *= m_.d_s * f;
    for (std::size_t k = 0; k < n_across; ++k) frame_.across[k][i] *= across_scale * f;
    for (auto& ang : frame_.angular)
      if (!ang.empty()) ang[i] *= m_.d_a * f;
  }
  if (spec_.flux_hook) {
    for (std::size_t i = 0; i < n; ++i) spec_.flux_hook(i, frame_);
  }

  ops_.derivatives_adjoint(frame_, out);
  if (spec_.variant == FlowVariant::mcf) {
    for (std::size_t i = 0; i < n; ++i) out[i] = -out[i] * std::sqrt(norm2_[i] + e2);
  } else {
    for (std::size_t i = 0; i < n; ++i) out[i] = -out[i];
  }
}

LiftedField FlowEngine::rhs(const LiftedField& w) const {
  LiftedField out(grid_);
  rhs(w.values(), out.values());
  return out;
}

void FlowEngine::step_in_place(LiftedField& w) const {
  const std::size_t n = grid_.size();
  scratch_.resize(n);
  rhs(w.values(), scratch_);
  auto v = w.values();
  const double dt = spec_.dt;
  for (std::size_t i = 0; i < n; ++i) v[i] += dt * scratch_[i];
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(v[i])) {
      throw NumericalError("non-finite value at sample " + std::to_string(i) +
                           " after an explicit step; reduce dt or check the input");
    }
  }
}

LiftedField FlowEngine::step(const LiftedField& w) const {
  LiftedField out = w;
  step_in_place(out);
  return out;
}

FlowTrajectory FlowEngine::run(const LiftedField& u) const {
  spec_.validate();
  check_step_size(spec_, m_, grid_);
  if (!grid_.same_shape(u.grid())) throw ConfigError("initial field does not match the flow grid");
  if (!u.all_finite()) throw NumericalError("initial field contains non-finite values");

  FlowTrajectory traj;
  const std::size_t total = spec_.step_count();
  std::vector<std::size_t> snap_steps;
  snap_steps.reserve(spec_.snapshot_times.size());
  for (double t : spec_.snapshot_times) snap_steps.push_back(std::min(steps_until(t, spec_.dt), total));

  LiftedField w = u;
  std::size_t next_snap = 0;
  auto record = [&](std::size_t k) {
    const double t = static_cast<double>(k) * spec_.dt;
    while (next_snap < snap_steps.size() && snap_steps[next_snap] == k) {
      traj.snapshots.push_back({spec_.snapshot_times[next_snap], k, w});
      ++next_snap;
    }
    if (k % spec_.trace_stride == 0 || k == total) {
      traj.energy_trace.push_back({t, ops_.tv_epsilon(w, m_)});
      traj.mass_trace.push_back({t, measure_.integrate(w)});
    }
  };

  record(0);
  for (std::size_t k = 1; k <= total; ++k) {
    step_in_place(w);
    record(k);
  }
  traj.steps = total;
  if (spec_.snapshot_times.empty()) traj.snapshots.push_back({static_cast<double>(total) * spec_.dt, total, w});
  traj.final_state = std::move(w);
  return traj;
}

LiftedField rhs(const LiftedField& w, const FlowSpec& spec, const MetricParams& m) {
  return FlowEngine(w.grid(), m, spec).rhs(w);
}

LiftedField step(const LiftedField& w, const FlowSpec& spec, const MetricParams& m) {
  return FlowEngine(w.grid(), m, spec).step(w);
}

FlowTrajectory run(const LiftedField& u, const FlowSpec& spec, const MetricParams& m) {
  return FlowEngine(u.grid(), m, spec).run(u);
}

}  // namespace rtflow
