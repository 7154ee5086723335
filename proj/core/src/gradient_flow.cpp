#include "rtflow/gradient_flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "rtflow/errors.hpp"
#include "rtflow/flow.hpp"
#include "rtflow/geometry.hpp"
#include "rtflow/synthetic.hpp"

namespace rtflow {

namespace {

void guard_size(const LiftedGrid& g) {
  if (g.size() > kOracleSampleLimit) {
    throw ConfigError("oracle grids are limited to " + std::to_string(kOracleSampleLimit) + " samples, got " +
                      std::to_string(g.size()));
  }
}

FlowSpec operator_spec(FlowVariant v, Interpolation interp) {
  FlowSpec s;
  s.variant = v;
  s.dt = 1.0;
  s.interp = interp;
  return s;
}

// out = -rhs, i.e. the H-gradient of the flow's energy.
void negative_rhs(const FlowEngine& e, std::span<const double> u, std::span<double> out) {
  e.rhs(u, out);
  for (double& x : out) x = -x;
}

}  // namespace

LiftedField tv_gradient(const LiftedField& u, const MetricParams& m, Interpolation interp) {
  const FlowEngine e(u.grid(), m, operator_spec(FlowVariant::tvf, interp));
  LiftedField out(u.grid());
  negative_rhs(e, u.values(), out.values());
  return out;
}

double laplacian_spectral_bound(const LiftedGrid& grid, const MetricParams& m, Interpolation interp) {
  const FlowEngine e(grid, m, operator_spec(FlowVariant::diffusion, interp));
  const Measure mu(grid, m);
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  LiftedField v(grid);
  for (double& x : v.values()) x = normal(rng);
  LiftedField av(grid);
  double lambda = 0.0;
  for (int it = 0; it < 80; ++it) {
    const double nv = mu.norm(v);
    if (nv == 0.0) break;
    for (double& x : v.values()) x /= nv;
    negative_rhs(e, v.values(), av.values());
    lambda = mu.norm(av);
    std::swap(v, av);
  }
  return 1.2 * lambda;
}

double prox_objective(const LiftedField& u, const ProxProblem& p) {
  const Measure mu(u.grid(), p.m);
  const double d = mu.distance(u, p.u0);
  return d * d / (2.0 * p.tau) + GeometryOperators(u.grid(), p.interp).tv_epsilon(u, p.m);
}

ProxResult prox_tv(const ProxProblem& p) {
  const LiftedGrid& g = p.u0.grid();
  guard_size(g);
  if (!(p.tau > 0.0)) throw ConfigError("prox step tau must be positive");
  if (!(p.tol > 0.0)) throw ConfigError("prox tolerance must be positive");
  if (!(p.m.eps > 0.0)) throw ConfigError("prox of TV_eps requires eps > 0");

  const Measure mu(g, p.m);
  const FlowEngine tv(g, p.m, operator_spec(FlowVariant::tvf, p.interp));
  const double spectral = p.spectral_bound > 0.0 ? p.spectral_bound : laplacian_spectral_bound(g, p.m, p.interp);
  const double lip = 1.0 / p.tau + spectral / p.m.eps;
  const double sc = 1.0 / p.tau;
  const double beta = (std::sqrt(lip) - std::sqrt(sc)) / (std::sqrt(lip) + std::sqrt(sc));
  const double target = p.tol * mu.norm(p.u0);

  const auto u0 = p.u0.values();
  const std::size_t n = g.size();
  LiftedField x = p.u0;
  LiftedField xp = p.u0;
  LiftedField y(g);
  LiftedField grad(g);
  ProxResult out;
  for (std::size_t k = 0; k <= p.max_iter; ++k) {
    auto xv = x.values();
    auto xpv = xp.values();
    auto yv = y.values();
    for (std::size_t i = 0; i < n; ++i) yv[i] = xv[i] + beta * (xv[i] - xpv[i]);
    negative_rhs(tv, yv, grad.values());
    auto gv = grad.values();
    for (std::size_t i = 0; i < n; ++i) gv[i] += (yv[i] - u0[i]) / p.tau;
    out.residual = p.tau * mu.norm(grad);
    out.iterations = k;
    if (out.residual <= target) {
      out.u = y;
      out.converged = true;
      return out;
    }
    if (k == p.max_iter) break;
    std::swap(xp, x);
    auto xn = x.values();
    for (std::size_t i = 0; i < n; ++i) xn[i] = yv[i] - gv[i] / lip;
  }
  out.u = std::move(y);
  out.converged = false;
  return out;
}

MovementResult minimizing_movement(const LiftedField& u0, double t, std::size_t n, const MetricParams& m,
                                   double tol, Interpolation interp) {
  if (n == 0) throw ConfigError("minimizing movement needs n >= 1");
  if (!(t >= 0.0)) throw ConfigError("minimizing movement needs t >= 0");
  guard_size(u0.grid());
  MovementResult r;
  r.u = u0;
  if (t == 0.0) return r;
  ProxProblem p;
  p.tau = t / static_cast<double>(n);
  p.m = m;
  p.tol = tol;
  p.interp = interp;
  p.spectral_bound = laplacian_spectral_bound(u0.grid(), m, interp);
  for (std::size_t k = 0; k < n; ++k) {
    p.u0 = std::move(r.u);
    ProxResult pr = prox_tv(p);
    r.residual_sum += pr.residual;
    r.prox_iterations += pr.iterations;
    r.converged = r.converged && pr.converged;
    r.u = std::move(pr.u);
    ++r.steps;
  }
  return r;
}

double mean_value(const LiftedField& u, const MetricParams& m) {
  const Measure mu(u.grid(), m);
  return mu.integrate(u) / mu.total();
}

double BoundCheckReport::input(const std::string& key) const {
  for (const auto& [k, v] : inputs)
    if (k == key) return v;
  throw ConfigError("report has no input '" + key + "'");
}

std::string BoundCheckReport::to_record() const {
  std::ostringstream os;
  os.precision(12);
  os << "check=" << check << " t=" << t << " lhs=" << lhs << " rhs=" << rhs << " margin=" << margin
     << " oracle_error=" << oracle_error << " applicable=" << (applicable ? 1 : 0)
     << " passed=" << (passed() ? 1 : 0);
  for (const auto& [k, v] : inputs) os << ' ' << k << '=' << v;
  return os.str();
}

namespace {

std::size_t oracle_steps(double slope_sum, double t, double bound, const OracleOptions& opt) {
  if (slope_sum == 0.0 || t == 0.0) return 1;
  if (!(bound > 0.0)) return opt.max_steps;
  const double n = std::ceil(slope_sum * t / (std::sqrt(2.0) * opt.oracle_fraction * bound));
  return static_cast<std::size_t>(std::clamp(n, 1.0, static_cast<double>(opt.max_steps)));
}

}  // namespace

BoundCheckReport check_theorem1(const LiftedField& u, std::pair<double, double> eps_pair, double t,
                                const MetricParams& m, const OracleOptions& opt) {
  const auto [e1, e2] = eps_pair;
  if (!(e1 > 0.0) || !(e2 > 0.0)) throw ConfigError("theorem 1 check needs positive eps values");
  if (!(t >= 0.0)) throw ConfigError("theorem 1 check needs t >= 0");
  guard_size(u.grid());
  MetricParams m0 = m;
  m0.eps = 0.0;
  MetricParams m1 = m;
  m1.eps = e1;
  MetricParams m2 = m;
  m2.eps = e2;

  const Measure mu(u.grid(), m0);
  const double vol = mu.total();
  const double norm_u = mu.norm(u);
  const double tv0 = GeometryOperators(u.grid(), opt.interp).tv_epsilon(u, m0);
  auto bound = [&](double delta) { return 8.0 * std::pow(norm_u * (tv0 + delta) * delta * t * t, 0.2); };
  const double d1 = e1 * vol;
  const double d2 = e2 * vol;

  BoundCheckReport r;
  r.check = "theorem1";
  r.t = t;
  r.rhs = bound(d1) + bound(d2);
  const double l1 = mu.norm(tv_gradient(u, m1, opt.interp));
  const double l2 = mu.norm(tv_gradient(u, m2, opt.interp));
  const std::size_t n = oracle_steps(l1 + l2, t, r.rhs, opt);

  const MovementResult w1 = minimizing_movement(u, t, n, m1, opt.prox_tol, opt.interp);
  const MovementResult w2 = e1 == e2 ? w1 : minimizing_movement(u, t, n, m2, opt.prox_tol, opt.interp);
  r.lhs = mu.distance(w1.u, w2.u);
  if (e1 != e2) {
    r.oracle_error = (l1 + l2) * t / (std::sqrt(2.0) * static_cast<double>(n)) + w1.residual_sum + w2.residual_sum;
  }
  r.margin = r.rhs - r.lhs - r.oracle_error;
  r.inputs = {{"eps1", e1},          {"eps2", e2},          {"norm_u", norm_u},
              {"tv0", tv0},          {"volume", vol},       {"delta1", d1},
              {"delta2", d2},        {"bound1", bound(d1)}, {"bound2", bound(d2)},
              {"L1", l1},            {"L2", l2},            {"n", static_cast<double>(n)},
              {"residual1", w1.residual_sum}, {"residual2", w2.residual_sum},
              {"converged", (w1.converged && w2.converged) ? 1.0 : 0.0}};
  return r;
}

BoundCheckReport check_theorem2(const Theorem2Setup& s, const OracleOptions& opt) {
  if (!(s.eps_f > 0.0) || !(s.eps_g > 0.0)) throw ConfigError("theorem 2 check needs positive eps values");
  if (!(s.t >= 0.0)) throw ConfigError("theorem 2 check needs t >= 0");
  if (!s.u0.grid().same_shape(s.v0.grid())) throw ConfigError("u0 and v0 live on different grids");
  guard_size(s.u0.grid());
  MetricParams mf = s.m;
  mf.eps = s.eps_f;
  MetricParams mg = s.m;
  mg.eps = s.eps_g;

  const Measure mu(s.u0.grid(), s.m);
  const double vol = mu.total();
  const GeometryOperators ops(s.u0.grid(), opt.interp);
  const double energy = std::max(ops.tv_epsilon(s.u0, mf), ops.tv_epsilon(s.v0, mg));
  auto spread = [&](const LiftedField& w) {
    const double mean = mu.integrate(w) / vol;
    LiftedField c(w.grid(), mean);
    return mu.distance(w, c);
  };
  const double m_appendix = std::max(spread(s.u0), spread(s.v0));
  const double m_main = std::max(mu.norm(s.u0), mu.norm(s.v0));
  const double delta = std::abs(s.eps_f - s.eps_g) * vol;
  const double gap0 = mu.distance(s.u0, s.v0);

  BoundCheckReport r;
  r.check = "theorem2";
  r.t = s.t;
  r.rhs = 16.0 * std::pow(m_appendix * energy * delta * s.t * s.t, 0.2) + gap0;

  double log_limit = std::numeric_limits<double>::infinity();
  if (delta > 0.0) {
    log_limit = (m_appendix > 0.0 && energy > 0.0)
                    ? 6.0 * std::log(energy) + 6.0 * std::log(m_appendix) - 9.0 * std::log(delta)
                    : -std::numeric_limits<double>::infinity();
  }
  // 0 <= t < E⁶M⁶/δ⁹, compared in logs.
  const double log_t = s.t > 0.0 ? std::log(s.t) : -std::numeric_limits<double>::infinity();
  r.applicable = delta == 0.0 || log_t < log_limit;

  const bool identical = s.eps_f == s.eps_g && std::equal(s.u0.values().begin(), s.u0.values().end(),
                                                          s.v0.values().begin());
  const double lu = mu.norm(tv_gradient(s.u0, mf, opt.interp));
  const double lv = mu.norm(tv_gradient(s.v0, mg, opt.interp));
  const std::size_t n = oracle_steps(lu + lv, s.t, r.rhs, opt);
  const MovementResult a = minimizing_movement(s.u0, s.t, n, mf, opt.prox_tol, opt.interp);
  const MovementResult b = identical ? a : minimizing_movement(s.v0, s.t, n, mg, opt.prox_tol, opt.interp);
  r.lhs = mu.distance(a.u, b.u);
  if (!identical) {
    r.oracle_error = (lu + lv) * s.t / (std::sqrt(2.0) * static_cast<double>(n)) + a.residual_sum + b.residual_sum;
  }
  r.margin = r.rhs - r.lhs - r.oracle_error;
  r.inputs = {{"eps_f", s.eps_f},     {"eps_g", s.eps_g},   {"E", energy},
              {"M", m_appendix},      {"M_main", m_main},   {"delta", delta},
              {"initial_gap", gap0},  {"log_t_limit", log_limit}, {"L_u", lu},
              {"L_v", lv},            {"n", static_cast<double>(n)},
              {"residual_u", a.residual_sum}, {"residual_v", b.residual_sum},
              {"converged", (a.converged && b.converged) ? 1.0 : 0.0}};
  return r;
}

PropositionBound proposition_bound(double delta, double slope, double t, double initial_gap) {
  if (!(delta >= 0.0) || !(slope >= 0.0) || !(t >= 0.0)) {
    throw ConfigError("proposition bound needs nonnegative delta, slope and t");
  }
  PropositionBound b;
  b.short_branch = 4.0 * std::sqrt(delta * t) + initial_gap;
  b.long_branch = 8.0 * std::cbrt(slope * delta * t * t) + initial_gap;
  b.short_time = slope == 0.0 || t <= delta / (slope * slope);
  b.value = b.short_time ? b.short_branch : b.long_branch;
  return b;
}

BoundCheckReport check_proposition(const Theorem2Setup& s, const BoundCheckReport& theorem2) {
  MetricParams mf = s.m;
  mf.eps = s.eps_f;
  MetricParams mg = s.m;
  mg.eps = s.eps_g;
  const Measure mu(s.u0.grid(), s.m);
  const double slope = std::max(mu.norm(tv_gradient(s.u0, mf)), mu.norm(tv_gradient(s.v0, mg)));
  const double delta = theorem2.input("delta");
  const PropositionBound b = proposition_bound(delta, slope, s.t, theorem2.input("initial_gap"));
  BoundCheckReport r;
  r.check = "proposition";
  r.t = s.t;
  r.lhs = theorem2.lhs;
  r.rhs = b.value;
  r.oracle_error = theorem2.oracle_error;
  r.margin = r.rhs - r.lhs - r.oracle_error;
  r.inputs = {{"L", slope},
              {"delta", delta},
              {"short_time", b.short_time ? 1.0 : 0.0},
              {"short_branch", b.short_branch},
              {"long_branch", b.long_branch}};
  return r;
}

BoundCheckReport check_lemma(const LiftedField& u0, double tau, const MetricParams& m, const LemmaProbeOptions& opt) {
  ProxProblem p;
  p.u0 = u0;
  p.tau = tau;
  p.m = m;
  p.tol = opt.prox_tol;
  p.max_iter = 1000000;
  p.interp = opt.interp;
  const ProxResult star = prox_tv(p);
  const double phi_star = prox_objective(star.u, p);
  const Measure mu(u0.grid(), m);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < opt.probes; ++k) {
    LiftedField u = random_field(u0.grid(), opt.seed + k, -opt.amplitude, opt.amplitude);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += star.u[i];
    const double d = mu.distance(u, star.u);
    worst = std::max(worst, d * d / (2.0 * tau) - (prox_objective(u, p) - phi_star));
  }
  BoundCheckReport r;
  r.check = "lemma";
  r.t = tau;
  r.lhs = worst;
  r.rhs = opt.slack;
  r.margin = r.rhs - r.lhs;
  r.inputs = {{"probes", static_cast<double>(opt.probes)},
              {"prox_residual", star.residual},
              {"prox_iterations", static_cast<double>(star.iterations)},
              {"converged", star.converged ? 1.0 : 0.0}};
  return r;
}

}  // namespace rtflow
