// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Pass criterion numbers as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rtflow/errors.hpp"
#include "rtflow/flow.hpp"
#include "rtflow/geometry.hpp"
#include "rtflow/gradient_flow.hpp"
#include "rtflow/metrics.hpp"
#include "rtflow/orientation_score.hpp"
#include "rtflow/sphere_grid.hpp"
#include "rtflow/synthetic.hpp"

using namespace rtflow;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Collects named sub-checks; the criterion passes when all of them do.
class Checks {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      if (!failures_.empty()) failures_ += "; ";
      failures_ += what;
    }
  }
  void note(const std::string& s) {
    if (!notes_.empty()) notes_ += ", ";
    notes_ += s;
  }
  Outcome done() const { return {pass_, pass_ ? notes_ : "failed: " + failures_ + " | " + notes_}; }

 private:
  bool pass_ = true;
  std::string failures_;
  std::string notes_;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

FlowSpec make_spec(FlowVariant v, double dt, double t_end = 0.0) {
  FlowSpec s;
  s.variant = v;
  s.dt = dt;
  s.t_end = t_end;
  return s;
}

LiftedField scaled(const LiftedField& u, double lambda) {
  LiftedField out = u;
  for (double& x : out.values()) x *= lambda;
  return out;
}

double max_abs_diff(const LiftedField& a, const LiftedField& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

LiftedField shift_periodic(const LiftedField& u, std::size_t sx, std::size_t sy) {
  const auto& g = u.grid();
  LiftedField out(g);
  for (std::size_t o = 0; o < g.n_orient; ++o)
    for (std::size_t y = 0; y < g.ny; ++y)
      for (std::size_t x = 0; x < g.nx; ++x) out.at((x + sx) % g.nx, (y + sy) % g.ny, 0, o) = u.at(x, y, 0, o);
  return out;
}

// Verification instances: 8x8x8 planar, D_S = D_A = 1, μ-norm at most 1.
const MetricParams kVerify{1.0, 1.0, 0.0, 0.1};

LiftedField unit_field(std::uint64_t seed) {
  LiftedField u = random_field(LiftedGrid::planar(8, 8, 8), seed);
  const double n = Measure(u.grid(), kVerify).norm(u);
  for (double& x : u.values()) x /= n;
  return u;
}

Outcome criterion_adjointness() {
  Checks c;
  const auto t0 = std::chrono::steady_clock::now();
  const MetricParams m{1.0, 0.1, 0.3, 0.0};
  const std::vector<LiftedGrid> grids{LiftedGrid::planar(8, 8, 8), LiftedGrid::planar(32, 32, 16),
                                      LiftedGrid::spatial(8, 8, 8, build_icosphere(1))};
  double worst = 0.0;
  for (const auto& g : grids) {
    const GeometryOperators ops(g);
    const Measure mu(g, m);
    for (std::uint64_t k = 0; k < 100; ++k) {
      const auto u = random_field(g, 1000 + k);
      const auto v = oracle::random_tangent_field(g, m, 5000 + k);
      const double lhs = mu.inner(u, ops.divergence(v, m));
      const double rhs = ops.metric_inner(ops.gradient(u, m), v, m);
      const double scale = mu.norm(u) * std::sqrt(ops.metric_inner(v, v, m));
      worst = std::max(worst, std::abs(lhs + rhs) / scale);
    }
  }
  const double secs = seconds_since(t0);
  c.require(worst <= 1e-10, "defect " + fmt(worst) + " > 1e-10");
  c.require(secs <= 10.0, "runtime " + fmt(secs) + " s > 10 s");
  c.note("worst relative defect " + fmt(worst) + " over 300 pairs");
  c.note(fmt(secs) + " s");
  return c.done();
}

Outcome criterion_gershgorin() {
  Checks c;
  const double d2 = dt_critical({1.0, 0.01, 0.0, 0.0}, 2, 1.0, kPi / 16);
  const MetricParams paper{1.0, 0.001, 0.0, 0.02};
  const double d3 = dt_critical(paper, 3, 1.0, kPi / 25);
  c.require(std::abs(d2 / 1.5756 - 1.0) <= 1e-3, "d=2 value " + fmt(d2));
  c.require(std::abs(d3 / 1.772 - 1.0) <= 1e-3, "d=3 value " + fmt(d3));
  const auto grid = LiftedGrid::spatial(4, 4, 4, build_icosphere(2));
  bool accepted = true;
  try {
    check_step_size(make_spec(FlowVariant::tvf, 0.01, 0.01), paper, grid);
    check_step_size(make_spec(FlowVariant::diffusion, 0.01, 0.01), paper, grid);
  } catch (const std::exception&) {
    accepted = false;
  }
  c.require(accepted, "dt = 0.01 rejected on the subdiv-2 sphere");
  c.require(0.01 <= 0.9 * d3, "dt = 0.01 above 0.9 dt_critical at h_a = pi/25");
  c.note("d=2 " + fmt(d2) + ", d=3 " + fmt(d3) + ", built sphere h_a=" + fmt(grid.h_a) + " gives " +
         fmt(dt_critical(paper, 3, 1.0, grid.h_a)) + "; dt=0.01 accepted");
  return c.done();
}

Outcome criterion_stability() {
  Checks c;
  const auto g = LiftedGrid::planar(16, 16, 16);
  const MetricParams m{1.0, 0.01, 0.0, 0.02};
  const double crit = dt_critical(m, 2, g.h, g.h_a);
  const auto u = random_field(g, 3);

  FlowSpec diff = make_spec(FlowVariant::diffusion, 0.9 * crit);
  diff.t_end = 1000 * diff.dt;
  FlowEngine engine(g, m, diff);
  const Measure mu(g, m);
  LiftedField w = u;
  const double sup0 = sup_norm(u);
  const double l2_0 = mu.norm(u);
  double growth = -std::numeric_limits<double>::infinity();
  double l2_growth = -std::numeric_limits<double>::infinity();
  std::size_t worst_step = 0;
  for (std::size_t k = 1; k <= 1000; ++k) {
    engine.step_in_place(w);
    const double gk = sup_norm(w) - sup0;
    if (gk > growth) {
      growth = gk;
      worst_step = k;
    }
    l2_growth = std::max(l2_growth, mu.norm(w) / l2_0 - 1.0);
  }
  c.require(growth <= 1e-9, "diffusion sup-norm growth " + fmt(growth) + " at step " + std::to_string(worst_step));

  FlowSpec tvf = make_spec(FlowVariant::tvf, 0.9 * m.eps * crit);
  tvf.t_end = 1000 * tvf.dt;
  bool finite = true;
  double worst_rise = -std::numeric_limits<double>::infinity();
  std::size_t steps = 0;
  try {
    const auto traj = run(u, tvf, m);
    steps = traj.steps;
    const auto& e = traj.energy_trace;
    for (std::size_t k = 1; k < e.size(); ++k) worst_rise = std::max(worst_rise, (e[k].value - e[k - 1].value) / e[0].value);
    finite = traj.final_field().all_finite();
  } catch (const NumericalError&) {
    finite = false;
  }
  c.require(steps == 1000, "TVF ran " + std::to_string(steps) + " steps");
  c.require(finite, "TVF produced non-finite values");
  c.require(worst_rise <= 1e-12, "TVF energy rose by " + fmt(worst_rise) + " TV(0)");
  c.note("diffusion: largest sup-norm growth " + fmt(growth) + " (step " + std::to_string(worst_step) +
         "), final sup " + fmt(sup_norm(w)) + " vs initial " + fmt(sup0) + ", largest L2(mu) growth " + fmt(l2_growth));
  c.note("TVF largest step change " + fmt(worst_rise) + " TV(0)");
  return c.done();
}

Outcome criterion_mass() {
  Checks c;
  const std::vector<LiftedGrid> grids{LiftedGrid::planar(16, 16, 16), LiftedGrid::spatial(6, 6, 6, build_icosphere(1))};
  const MetricParams m{1.0, 0.01, 0.0, 0.02};
  double worst = 0.0;
  for (const auto& g : grids) {
    const Measure mu(g, m);
    const auto u = random_field(g, 4, 0.0, 1.0);
    const double m0 = mu.integrate(u);
    for (auto v : {FlowVariant::diffusion, FlowVariant::tvf, FlowVariant::perona_malik}) {
      FlowSpec s = make_spec(v, stable_dt(v, m, g));
      s.t_end = 1000 * s.dt;
      const auto traj = run(u, s, m);
      double drift = 0.0;
      for (const auto& p : traj.mass_trace) drift = std::max(drift, std::abs(p.value - m0) / std::abs(m0));
      c.require(traj.steps == 1000, std::string(to_string(v)) + " ran " + std::to_string(traj.steps) + " steps");
      c.require(drift <= 1e-9, std::string(to_string(v)) + " d=" + std::to_string(g.dim) + " drift " + fmt(drift));
      worst = std::max(worst, drift);
    }
  }
  c.note("worst relative drift " + fmt(worst) + " (diffusion, tvf, pm; d=2 and d=3)");
  return c.done();
}

Outcome criterion_scaling() {
  Checks c;
  const MetricParams m{1.0, 0.2, 0.25, 0.05};
  double worst = 0.0;
  for (const auto& g : {LiftedGrid::planar(16, 16, 8), LiftedGrid::spatial(5, 5, 5, build_icosphere(1))}) {
    for (std::uint64_t seed : {21, 22, 23}) {
      const auto w = random_field(g, seed);
      for (double lambda : {0.5, 2.0, 10.0}) {
        MetricParams ml = m;
        ml.eps = m.eps / lambda;
        const auto lw = scaled(w, lambda);
        const double tvf = oracle::rel_sup_diff(rhs(lw, make_spec(FlowVariant::tvf, 0.01), m).values(),
                                                rhs(w, make_spec(FlowVariant::tvf, 0.01), ml).values());
        const double mcf = oracle::rel_sup_diff(rhs(lw, make_spec(FlowVariant::mcf, 0.01), m).values(),
                                                scaled(rhs(w, make_spec(FlowVariant::mcf, 0.01), ml), lambda).values());
        const double dif =
            oracle::rel_sup_diff(rhs(lw, make_spec(FlowVariant::diffusion, 0.01), m).values(),
                                 scaled(rhs(w, make_spec(FlowVariant::diffusion, 0.01), m), lambda).values());
        worst = std::max({worst, tvf, mcf, dif});
      }
    }
  }
  c.require(worst <= 1e-10, "relative defect " + fmt(worst));
  c.note("worst relative defect " + fmt(worst));
  return c.done();
}

Outcome criterion_equivariance() {
  Checks c;
  const MetricParams m{1.0, 0.01, 0.0, 0.02};
  const auto g = LiftedGrid::planar(16, 16, 16);
  FlowSpec s = make_spec(FlowVariant::tvf, stable_dt(FlowVariant::tvf, m, g));
  s.t_end = 50 * s.dt;
  const auto u = random_field(g, 6);
  const double rot = max_abs_diff(rotate_quarter_turn(run(u, s, m).final_field()),
                                  run(rotate_quarter_turn(u), s, m).final_field());
  // Quarter turn followed by a translation on a periodic grid.
  const auto gp = LiftedGrid::planar(16, 16, 16, 1.0, Boundary::periodic);
  const auto up = random_field(gp, 7);
  auto roto = [](const LiftedField& f) { return shift_periodic(rotate_quarter_turn(f), 5, 3); };
  const double rt = max_abs_diff(roto(run(up, s, m).final_field()), run(roto(up), s, m).final_field());
  c.require(rot <= 1e-12, "quarter turn defect " + fmt(rot));
  c.require(rt <= 1e-12, "roto-translation defect " + fmt(rt));
  c.note("50 TVF steps: quarter turn " + fmt(rot) + ", with periodic shift " + fmt(rt));
  return c.done();
}

Outcome criterion_diffusion_oracle() {
  Checks c;
  double worst = 0.0;
  for (double frac : {0.0, 0.5})
    for (auto bc : {Boundary::neumann, Boundary::periodic}) {
      const auto g = LiftedGrid::planar(8, 8, 8, 1.0, bc);
      const MetricParams m{1.0, 0.3, frac, 0.0};
      const double dt = stable_dt(FlowVariant::diffusion, m, g);
      const auto a = oracle::assemble_planar_diffusion(g, m);
      const auto w = random_field(g, 8);
      const Eigen::VectorXd expected = oracle::to_vector(w) + dt * (a * oracle::to_vector(w));
      const auto got = step(w, make_spec(FlowVariant::diffusion, dt), m);
      const std::vector<double> exp(expected.data(), expected.data() + expected.size());
      worst = std::max(worst, oracle::rel_sup_diff(got.values(), exp));
    }
  c.require(worst <= 1e-12, "relative difference " + fmt(worst));
  c.note("worst relative difference " + fmt(worst) + " (frac 0/0.5, neumann/periodic)");
  return c.done();
}

Outcome criterion_minimizing_movement() {
  Checks c;
  const auto u0 = unit_field(4);
  const double t = 0.5;
  const double slope = Measure(u0.grid(), kVerify).norm(tv_gradient(u0, kVerify));
  auto euler = [&](std::size_t steps) {
    return run(u0, make_spec(FlowVariant::tvf, t / double(steps), t), kVerify).final_field();
  };
  const auto fine = euler(4096);
  const double allowance = 2.0 * Measure(u0.grid(), kVerify).distance(euler(2048), fine);
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t n : {8, 32, 128}) {
    const auto mm = minimizing_movement(u0, t, n, kVerify, 1e-10);
    const double gap = Measure(u0.grid(), kVerify).distance(mm.u, fine);
    const double bound = slope * t / (std::sqrt(2.0) * double(n)) + allowance + mm.residual_sum;
    c.require(mm.converged, "prox did not converge at n=" + std::to_string(n));
    c.require(gap <= bound, "n=" + std::to_string(n) + " gap " + fmt(gap) + " > bound " + fmt(bound));
    c.require(gap < prev, "gap did not shrink at n=" + std::to_string(n));
    c.note("n=" + std::to_string(n) + " gap " + fmt(gap) + " bound " + fmt(bound));
    prev = gap;
  }
  c.note("Euler allowance " + fmt(allowance));
  return c.done();
}

Outcome criterion_theorem1() {
  Checks c;
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t passed = 0;
  std::size_t total = 0;
  std::size_t monotone = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  // 25 instances x 2 eps pairs along the halving sequence 0.1, 0.05, 0.025.
  for (std::uint64_t i = 0; i < 25; ++i) {
    const double t = i % 2 == 0 ? 0.1 : 1.0;
    const auto u = unit_field(100 + i);
    const auto a = check_theorem1(u, {0.1, 0.05}, t, kVerify);
    const auto b = check_theorem1(u, {0.05, 0.025}, t, kVerify);
    for (const auto* r : {&a, &b}) {
      ++total;
      if (r->applicable && r->margin >= 0.0) ++passed;
      min_margin = std::min(min_margin, r->margin);
    }
    if (b.lhs < a.lhs) ++monotone;
  }
  const double secs = seconds_since(t0);
  c.require(passed == total, std::to_string(total - passed) + " of " + std::to_string(total) + " margins negative");
  c.require(monotone == 25, std::to_string(25 - monotone) + " instances with non-decreasing lhs");
  c.require(secs <= 300.0, "runtime " + fmt(secs) + " s > 300 s");
  c.note(std::to_string(passed) + "/" + std::to_string(total) + " margins >= 0 (smallest " + fmt(min_margin) +
         "), lhs decreasing in " + std::to_string(monotone) + "/25, " + fmt(secs) + " s");
  return c.done();
}

Outcome criterion_lemma() {
  Checks c;
  double worst = -std::numeric_limits<double>::infinity();
  std::size_t probes = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    LemmaProbeOptions opt;
    opt.probes = 20;
    opt.seed = 7000 + 31 * i;
    // Small probes sit where the inequality is tight, large ones sample the far field.
    opt.amplitude = i % 3 == 0 ? 0.5 : (i % 3 == 1 ? 0.05 : 0.005);
    const double tau = i % 2 == 0 ? 0.1 : 0.5;
    const auto r = check_lemma(unit_field(200 + i), tau, kVerify, opt);
    probes += static_cast<std::size_t>(r.input("probes"));
    worst = std::max(worst, r.lhs);
    c.require(r.input("converged") == 1.0, "prox for instance " + std::to_string(i) + " did not converge");
    c.require(r.passed(), "instance " + std::to_string(i) + " excess " + fmt(r.lhs));
  }
  c.require(probes == 1000, std::to_string(probes) + " probes");

  double worst_ratio = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    ProxProblem p;
    p.tau = 0.5;
    p.m = kVerify;
    p.tol = 1e-12;
    p.u0 = unit_field(400 + i);
    const auto pu = prox_tv(p);
    p.u0 = unit_field(600 + i);
    const auto pv = prox_tv(p);
    const Measure mu(p.u0.grid(), kVerify);
    const double before = mu.distance(unit_field(400 + i), p.u0);
    const double after = mu.distance(pu.u, pv.u);
    worst_ratio = std::max(worst_ratio, after / before);
    c.require(after <= before + pu.residual + pv.residual, "pair " + std::to_string(i) + " expanded");
  }
  c.note(std::to_string(probes) + " probes, worst excess " + fmt(worst) + " (slack 1e-8); 100 pairs, worst ratio " +
         fmt(worst_ratio));
  return c.done();
}

Outcome criterion_icosphere() {
  Checks c;
  const std::size_t expected[3] = {12, 42, 162};
  for (int level = 0; level <= 2; ++level) {
    const auto s = build_icosphere(level);
    double total = 0.0;
    for (double w : s->weights()) total += w;
    c.require(s->size() == expected[level], "subdiv " + std::to_string(level) + " has " + std::to_string(s->size()));
    c.require(std::abs(total - 4.0 * kPi) <= 1e-10, "weights sum to " + fmt(total));
  }
  const auto s = build_icosphere(2);
  std::vector<double> f(s->size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = s->vertex(i).z();
  const auto lap = spherical_divergence(spherical_gradient(f, *s), *s);
  double num = 0.0;
  double den = 0.0;
  double res = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double w = s->weights()[i];
    num += w * lap[i] * f[i];
    den += w * f[i] * f[i];
    res += w * (lap[i] + 2.0 * f[i]) * (lap[i] + 2.0 * f[i]);
  }
  const double rayleigh = num / den;
  const double defect = std::sqrt(res / (4.0 * den));
  c.require(std::abs(rayleigh / -2.0 - 1.0) <= 0.05, "Rayleigh quotient " + fmt(rayleigh));
  c.require(defect <= 0.05, "relative eigen defect " + fmt(defect));
  c.note("counts 12/42/162, degree-1 Rayleigh quotient " + fmt(rayleigh) + ", relative defect " + fmt(defect));
  return c.done();
}

Outcome criterion_round_trip() {
  Checks c;
  const WaveletStack w = build_cake_wavelets(CakeParams{});
  double worst = 0.0;
  for (std::size_t n : {64, 65, 96})
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const Image f = band_limited_image(n, n, 0.5, seed);
      const Image g = reconstruct(lift(f, w), w);
      double num = 0.0;
      double den = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) {
        num += (g.data[i] - f.data[i]) * (g.data[i] - f.data[i]);
        den += f.data[i] * f.data[i];
      }
      worst = std::max(worst, std::sqrt(num / den));
    }
  c.require(worst <= 0.02, "relative L2 error " + fmt(worst));
  c.note("worst relative L2 error " + fmt(worst) + " over 15 images");
  return c.done();
}

struct CurveSummary {
  double initial = 0.0;
  double minimum = 0.0;
  double t_min = 0.0;
  double final = 0.0;
};

CurveSummary denoise(const LiftedField& noisy, const LiftedField& clean, const MetricParams& m, FlowVariant v,
                     double dt, double t_end, double every, double pm_k = 0.2) {
  FlowSpec s = make_spec(v, dt, t_end);
  s.pm_k = pm_k;
  for (double t = every; t <= t_end + 1e-9; t += every) s.snapshot_times.push_back(t);
  s.trace_stride = 1000000;
  std::vector<Snapshot> snaps{{0.0, 0, noisy}};
  auto traj = run(noisy, s, m);
  for (auto& sn : traj.snapshots) snaps.push_back(std::move(sn));
  const ErrorCurve curve = compute_error_curve(snaps, clean, ErrorKind::l2_abs, m);
  const ErrorPoint& best = curve.minimum();
  return {curve.points.front().error, best.error, best.t, curve.points.back().error};
}

Outcome criterion_denoising() {
  Checks c;
  const auto t0 = std::chrono::steady_clock::now();
  const auto sphere = build_icosphere(2);
  const auto ph = two_bundle_phantom(24, sphere, 60.0, 3.0, 20.0);
  LiftedField noisy = ph.field;
  add_gaussian_noise(noisy.values(), 0.1, 13);
  const MetricParams m{1.0, 0.001, 0.0, 0.02};

  const auto tvf = denoise(noisy, ph.field, m, FlowVariant::tvf, 0.01, 4.0, 0.25);
  const auto mcf = denoise(noisy, ph.field, m, FlowVariant::mcf, 0.01, 2.0, 0.25);
  const auto pm = denoise(noisy, ph.field, m, FlowVariant::perona_malik, 1.0, 200.0, 10.0);
  const double secs = seconds_since(t0);

  c.require(tvf.minimum < tvf.initial, "TVF never dips below its t=0 error");
  c.require(mcf.minimum < mcf.initial, "MCF never dips below its t=0 error");
  c.require(tvf.minimum <= pm.minimum, "TVF minimum above the Perona-Malik minimum");
  c.require(secs <= 600.0, "runtime " + fmt(secs) + " s > 600 s");
  auto describe = [](const char* name, const CurveSummary& s) {
    return std::string(name) + " " + fmt(s.initial) + " -> min " + fmt(s.minimum) + " at t=" + fmt(s.t_min);
  };
  c.note(describe("TVF", tvf));
  c.note(describe("MCF", mcf));
  c.note(describe("PM", pm));
  c.note(fmt(secs) + " s");
  return c.done();
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "adjointness of gradient and divergence", criterion_adjointness},
      {2, "Gershgorin step bounds", criterion_gershgorin},
      {3, "stability at the step bound", criterion_stability},
      {4, "mass conservation", criterion_mass},
      {5, "right-hand side scaling identities", criterion_scaling},
      {6, "roto-translation equivariance", criterion_equivariance},
      {7, "diffusion step against the assembled operator", criterion_diffusion_oracle},
      {8, "minimizing movements against the explicit flow", criterion_minimizing_movement},
      {9, "eps-stability bound on random instances", criterion_theorem1},
      {10, "prox inequality probes and non-expansiveness", criterion_lemma},
      {11, "icosphere counts, weights and first eigenvalue", criterion_icosphere},
      {12, "orientation score round trip", criterion_round_trip},
      {13, "denoising error curves on the two-bundle phantom", criterion_denoising},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& cr : all) {
    if (!selected.empty() && !selected.count(cr.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << cr.id << "] " << cr.title << ": " << o.detail << " ("
              << fmt(seconds_since(t0)) << " s)" << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criterion(s) failed") << std::endl;
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
