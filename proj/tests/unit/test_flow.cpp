#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "rtflow/errors.hpp"
#include "rtflow/flow.hpp"
#include "rtflow/sphere_grid.hpp"
#include "rtflow/synthetic.hpp"

using namespace rtflow;

namespace {

constexpr double kPi = std::numbers::pi;

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

double dirichlet_energy(const FlowEngine& e, const LiftedField& w) {
  const auto& ops = e.operators();
  FrameComponents c;
  ops.derivatives(w.values(), !e.metric().sub_riemannian(), c);
  LiftedField sq(w.grid());
  ops.squared_norm(c, e.metric(), sq.values());
  return Measure(w.grid(), e.metric()).integrate(sq);
}

LiftedField shift_periodic(const LiftedField& u, std::size_t sx, std::size_t sy) {
  const auto& g = u.grid();
  LiftedField out(g);
  for (std::size_t o = 0; o < g.n_orient; ++o)
    for (std::size_t y = 0; y < g.ny; ++y)
      for (std::size_t x = 0; x < g.nx; ++x) out.at((x + sx) % g.nx, (y + sy) % g.ny, 0, o) = u.at(x, y, 0, o);
  return out;
}

double max_abs_diff(const LiftedField& a, const LiftedField& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_SUITE("flow") {

TEST_CASE("variant names and exponents") {
  CHECK(parse_flow_variant("diffusion") == FlowVariant::diffusion);
  CHECK(parse_flow_variant("tvf") == FlowVariant::tvf);
  CHECK(parse_flow_variant("mcf") == FlowVariant::mcf);
  CHECK(parse_flow_variant("pm") == FlowVariant::perona_malik);
  CHECK_THROWS_AS(parse_flow_variant("heat"), ConfigError);
  CHECK(variant_from_exponents(0, 0) == FlowVariant::diffusion);
  CHECK(variant_from_exponents(0, 1) == FlowVariant::tvf);
  CHECK(variant_from_exponents(1, 1) == FlowVariant::mcf);
  CHECK_THROWS_AS(variant_from_exponents(1, 0), ConfigError);
  for (auto v : {FlowVariant::diffusion, FlowVariant::tvf, FlowVariant::mcf}) {
    const FlowSpec s = make_spec(v, 0.1);
    CHECK(variant_from_exponents(s.a(), s.b()) == v);
    CHECK(parse_flow_variant(to_string(v)) == v);
  }
}

TEST_CASE("critical step values") {
  CHECK(dt_critical({1.0, 0.01, 0.0, 0.0}, 2, 1.0, kPi / 16) == doctest::Approx(1.5756).epsilon(1e-3));
  CHECK(dt_critical({1.0, 0.001, 0.0, 0.0}, 3, 1.0, kPi / 25) == doctest::Approx(1.772).epsilon(1e-3));
  CHECK(dt_critical({2.0, 1e-12, 0.0, 0.0}, 2, 0.5, 0.1) == doctest::Approx(2 * 0.25 / 2.0).epsilon(1e-9));
  CHECK_THROWS_AS(dt_critical({1.0, 1.0, 0.0, 0.0}, 2, 0.0, 0.1), ConfigError);

  const auto g = LiftedGrid::planar(8, 8, 16);
  const MetricParams m{1.0, 0.01, 0.0, 0.02};
  const double crit = dt_critical(m, 2, 1.0, g.h_a);
  CHECK(stable_dt(FlowVariant::diffusion, m, g) == doctest::Approx(0.9 * crit));
  CHECK(stable_dt(FlowVariant::tvf, m, g) == doctest::Approx(0.9 * 0.02 * crit));
}

TEST_CASE("step size bound is enforced") {
  const auto g = LiftedGrid::spatial(4, 4, 4, build_icosphere(2));
  const MetricParams m{1.0, 0.001, 0.0, 0.02};
  CHECK_NOTHROW(check_step_size(make_spec(FlowVariant::tvf, 0.01), m, g));
  const double limit = stable_dt(FlowVariant::diffusion, m, g);
  CHECK_NOTHROW(check_step_size(make_spec(FlowVariant::diffusion, limit), m, g));
  try {
    run(LiftedField(g), make_spec(FlowVariant::diffusion, 1.01 * limit, 1.0), m);
    FAIL("expected a configuration error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("exceeds the stable step") != std::string::npos);
  }
}

TEST_CASE("invalid flow parameters") {
  const auto g = LiftedGrid::planar(8, 8, 8);
  CHECK_THROWS_AS(FlowEngine(g, {1.0, 1.0, 0.0, 0.0}, make_spec(FlowVariant::tvf, 0.01)), ConfigError);
  CHECK_THROWS_AS(FlowEngine(g, {1.0, 1.0, 0.0, 0.0}, make_spec(FlowVariant::mcf, 0.01)), ConfigError);
  FlowSpec pm = make_spec(FlowVariant::perona_malik, 0.01);
  pm.pm_k = 0.0;
  CHECK_THROWS_AS(FlowEngine(g, {1.0, 1.0, 0.0, 0.0}, pm), ConfigError);
  FlowSpec bad = make_spec(FlowVariant::diffusion, 0.1, 1.0);
  bad.snapshot_times = {0.5, 0.2};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.snapshot_times = {1.5};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("constants are stationary for every variant") {
  const MetricParams m{1.0, 0.1, 0.3, 0.05};
  for (const auto& g : {LiftedGrid::planar(8, 8, 8), LiftedGrid::spatial(4, 4, 4, build_icosphere(1)),
                        LiftedGrid::planar(1, 1, 8)}) {
    for (auto v : {FlowVariant::diffusion, FlowVariant::tvf, FlowVariant::mcf, FlowVariant::perona_malik}) {
      const LiftedField c(g, 0.7);
      const auto r = rhs(c, make_spec(v, 0.01), m);
      CHECK(sup_norm(r) <= 1e-14);
      CHECK(max_abs_diff(step(c, make_spec(v, 0.01), m), c) == 0.0);
    }
  }
}

TEST_CASE("right-hand side scaling identities") {
  const auto s1 = build_icosphere(1);
  for (const auto& g : {LiftedGrid::planar(16, 16, 8), LiftedGrid::spatial(5, 5, 5, s1)}) {
    const MetricParams m{1.0, 0.2, 0.25, 0.05};
    const auto w = random_field(g, 21);
    for (double lambda : {0.5, 2.0, 10.0}) {
      MetricParams ml = m;
      ml.eps = m.eps / lambda;
      const auto lw = scaled(w, lambda);
      CHECK(oracle::rel_sup_diff(rhs(lw, make_spec(FlowVariant::tvf, 0.01), m).values(),
                                 rhs(w, make_spec(FlowVariant::tvf, 0.01), ml).values()) <= 1e-10);
      CHECK(oracle::rel_sup_diff(rhs(lw, make_spec(FlowVariant::mcf, 0.01), m).values(),
                                 scaled(rhs(w, make_spec(FlowVariant::mcf, 0.01), ml), lambda).values()) <= 1e-10);
      CHECK(oracle::rel_sup_diff(rhs(lw, make_spec(FlowVariant::diffusion, 0.01), m).values(),
                                 scaled(rhs(w, make_spec(FlowVariant::diffusion, 0.01), m), lambda).values()) <= 1e-10);
    }
  }
}

TEST_CASE("MCF approaches its eps-free limit at second order") {
  // Smooth field with ‖∇W‖ bounded away from zero everywhere, so every
  // flux entering a sample is regular.
  const auto g = LiftedGrid::planar(16, 16, 8);
  LiftedField w(g);
  for (std::size_t o = 0; o < 8; ++o)
    for (std::size_t y = 0; y < 16; ++y)
      for (std::size_t x = 0; x < 16; ++x)
        w.at(x, y, 0, o) = 0.5 * double(x) + std::sin(2 * kPi * double(y) / 16) + 0.3 * std::cos(2 * kPi * double(o) / 8);
  MetricParams m{1.0, 0.5, 1.0, 0.0};
  auto r = [&](double eps) {
    m.eps = eps;
    return rhs(w, make_spec(FlowVariant::mcf, 0.01), m);
  };
  const auto r2 = r(1e-2);
  const auto r3 = r(1e-3);
  const auto r4 = r(1e-4);
  const double d1 = max_abs_diff(r2, r3);
  const double d2 = max_abs_diff(r3, r4);
  MESSAGE("MCF eps differences: " << d1 << ", " << d2);
  CHECK(d1 / d2 > 50.0);
  CHECK(d1 / d2 < 200.0);
}

TEST_CASE("one diffusion step matches the assembled operator") {
  for (double frac : {0.0, 0.5}) {
    for (auto bc : {Boundary::neumann, Boundary::periodic}) {
      const auto g = LiftedGrid::planar(8, 8, 8, 1.0, bc);
      const MetricParams m{1.0, 0.3, frac, 0.0};
      const double dt = stable_dt(FlowVariant::diffusion, m, g);
      const auto a = oracle::assemble_planar_diffusion(g, m);
      LiftedField impulse(g);
      impulse.at(3, 4, 0, 2) = 1.0;
      for (const auto& w : {impulse, random_field(g, 4)}) {
        const Eigen::VectorXd expected = oracle::to_vector(w) + dt * (a * oracle::to_vector(w));
        const auto got = step(w, make_spec(FlowVariant::diffusion, dt), m);
        std::vector<double> exp(expected.data(), expected.data() + expected.size());
        CHECK(oracle::rel_sup_diff(got.values(), exp) <= 1e-12);
      }
    }
  }
}

TEST_CASE("mass is conserved by divergence-form variants") {
  const auto s1 = build_icosphere(1);
  for (const auto& g : {LiftedGrid::planar(8, 8, 8), LiftedGrid::spatial(4, 4, 4, s1)}) {
    const MetricParams m{1.0, 0.1, 0.2, 0.05};
    for (auto v : {FlowVariant::diffusion, FlowVariant::tvf, FlowVariant::perona_malik}) {
      FlowSpec spec = make_spec(v, 0.0);
      spec.dt = stable_dt(v, m, g);
      spec.t_end = 300 * spec.dt;
      const auto traj = run(random_field(g, 31), spec, m);
      REQUIRE(traj.steps == 300);
      const double m0 = traj.mass_trace.front().value;
      double scale = 0.0;
      const auto u0 = random_field(g, 31);
      for (double x : u0.values()) scale += std::abs(x);
      scale *= Measure(g, m).total() / double(g.size());
      for (const auto& p : traj.mass_trace) CHECK(std::abs(p.value - m0) <= 1e-9 * std::max(std::abs(m0), scale));
    }
  }
}

TEST_CASE("TVF energy is non-increasing") {
  const auto g = LiftedGrid::planar(16, 16, 8);
  const MetricParams m{1.0, 0.1, 0.0, 0.05};
  FlowSpec spec = make_spec(FlowVariant::tvf, 0.5 * m.eps * dt_critical(m, 2, g.h, g.h_a));
  spec.t_end = 200 * spec.dt;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto traj = run(random_field(g, seed), spec, m);
    const double slack = 1e-12 * traj.energy_trace.front().value;
    for (std::size_t k = 1; k < traj.energy_trace.size(); ++k)
      CHECK(traj.energy_trace[k].value <= traj.energy_trace[k - 1].value + slack);
    CHECK(traj.energy_trace.back().value < traj.energy_trace.front().value);
  }
}

TEST_CASE("diffusion dissipates the Dirichlet energy") {
  const auto g = LiftedGrid::spatial(5, 5, 5, build_icosphere(1));
  const MetricParams m{1.0, 0.2, 0.3, 0.0};
  const FlowEngine e(g, m, make_spec(FlowVariant::diffusion, stable_dt(FlowVariant::diffusion, m, g)));
  LiftedField w = random_field(g, 8);
  double prev = dirichlet_energy(e, w);
  for (int k = 0; k < 50; ++k) {
    e.step_in_place(w);
    const double cur = dirichlet_energy(e, w);
    CHECK(cur <= prev * (1.0 + 1e-14));
    prev = cur;
  }
}

TEST_CASE("diffusion obeys the maximum principle at the stable step") {
  const auto g = LiftedGrid::planar(8, 8, 8);
  const MetricParams m{1.0, 0.05, 0.0, 0.0};
  FlowSpec spec = make_spec(FlowVariant::diffusion, 0.9 * dt_critical(m, 2, g.h, g.h_a));
  spec.t_end = 200 * spec.dt;
  const auto u = random_field(g, 12);
  const auto traj = run(u, spec, m);
  CHECK(sup_norm(traj.final_field()) <= sup_norm(u) + 1e-9);
}

TEST_CASE("quarter turns commute with the flow") {
  const auto g = LiftedGrid::planar(16, 16, 16);
  const MetricParams m{1.0, 0.1, 0.2, 0.05};
  FlowSpec spec = make_spec(FlowVariant::tvf, stable_dt(FlowVariant::tvf, m, g));
  spec.t_end = 20 * spec.dt;
  const auto u = random_field(g, 41);
  const auto a = rotate_quarter_turn(run(u, spec, m).final_field());
  const auto b = run(rotate_quarter_turn(u), spec, m).final_field();
  CHECK(max_abs_diff(a, b) <= 1e-12);
}

TEST_CASE("periodic translations commute with the flow") {
  const auto g = LiftedGrid::planar(12, 10, 8, 1.0, Boundary::periodic);
  const MetricParams m{1.0, 0.1, 0.3, 0.05};
  for (auto v : {FlowVariant::diffusion, FlowVariant::tvf}) {
    FlowSpec spec = make_spec(v, stable_dt(v, m, g));
    spec.t_end = 10 * spec.dt;
    const auto u = random_field(g, 43);
    const auto a = shift_periodic(run(u, spec, m).final_field(), 3, 7);
    const auto b = run(shift_periodic(u, 3, 7), spec, m).final_field();
    MESSAGE(to_string(v) << " translation defect " << max_abs_diff(a, b));
    CHECK(max_abs_diff(a, b) == 0.0);
  }
}

TEST_CASE("MCF commutes with contrast scaling") {
  const auto g = LiftedGrid::planar(8, 8, 8);
  const MetricParams m{1.0, 0.2, 0.0, 0.05};
  FlowSpec spec = make_spec(FlowVariant::mcf, 0.5 * stable_dt(FlowVariant::mcf, m, g));
  spec.t_end = 20 * spec.dt;
  spec.snapshot_times = {0.0, 5 * spec.dt, spec.t_end};
  const auto u = random_field(g, 47);
  for (double lambda : {0.5, 2.0, 10.0}) {
    MetricParams ml = m;
    ml.eps = m.eps / lambda;
    const auto a = run(scaled(u, lambda), spec, m);
    const auto b = run(u, spec, ml);
    REQUIRE(a.snapshots.size() == b.snapshots.size());
    for (std::size_t k = 0; k < a.snapshots.size(); ++k)
      CHECK(oracle::rel_sup_diff(a.snapshots[k].field.values(), scaled(b.snapshots[k].field, lambda).values()) <= 1e-10);
  }
}

TEST_CASE("snapshots and traces") {
  const auto g = LiftedGrid::planar(8, 8, 8);
  const MetricParams m{1.0, 0.1, 0.0, 0.0};
  const auto u = random_field(g, 3);
  SUBCASE("t_end = 0 returns the input") {
    const auto traj = run(u, make_spec(FlowVariant::diffusion, 0.1, 0.0), m);
    REQUIRE(traj.snapshots.size() == 1);
    CHECK(traj.snapshots[0].time == 0.0);
    CHECK(max_abs_diff(traj.snapshots[0].field, u) == 0.0);
    CHECK(traj.steps == 0);
  }
  SUBCASE("times round down to completed steps") {
    FlowSpec spec = make_spec(FlowVariant::diffusion, 0.1, 1.0);
    spec.snapshot_times = {0.0, 0.25, 0.3, 1.0};
    spec.trace_stride = 3;
    const auto traj = run(u, spec, m);
    REQUIRE(traj.snapshots.size() == 4);
    CHECK(traj.snapshots[1].step == 2);
    CHECK(traj.snapshots[2].step == 3);
    CHECK(traj.snapshots[3].step == 10);
    CHECK(traj.snapshots[1].time == 0.25);
    CHECK(max_abs_diff(traj.snapshots[3].field, traj.final_field()) == 0.0);
    // Every third step plus the last.
    REQUIRE(traj.energy_trace.size() == 5);
    CHECK(traj.energy_trace.back().time == doctest::Approx(1.0));
    const FlowEngine e(g, m, spec);
    LiftedField w = u;
    e.step_in_place(w);
    e.step_in_place(w);
    CHECK(max_abs_diff(traj.snapshots[1].field, w) == 0.0);
  }
  SUBCASE("runs are deterministic") {
    FlowSpec spec = make_spec(FlowVariant::diffusion, 0.1, 0.5);
    CHECK(max_abs_diff(run(u, spec, m).final_field(), run(u, spec, m).final_field()) == 0.0);
  }
}

TEST_CASE("non-finite values abort the flow") {
  const auto g = LiftedGrid::planar(8, 8, 8);
  const MetricParams m{1.0, 0.1, 0.0, 0.0};
  FlowSpec spec = make_spec(FlowVariant::diffusion, 0.1, 0.5);
  SUBCASE("from a poisoned flux") {
    spec.flux_hook = [](std::size_t i, FrameComponents& f) {
      if (i == 5) f.along[i] = std::numeric_limits<double>::quiet_NaN();
    };
    CHECK_THROWS_AS(run(random_field(g, 1), spec, m), NumericalError);
  }
  SUBCASE("from the input") {
    auto u = random_field(g, 1);
    u[7] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(run(u, spec, m), NumericalError);
  }
}

TEST_CASE("flux hook reaches every sample") {
  const auto g = LiftedGrid::planar(8, 8, 8);
  const MetricParams m{1.0, 0.1, 0.0, 0.0};
  const auto u = random_field(g, 2);
  FlowSpec spec = make_spec(FlowVariant::diffusion, 0.1);
  spec.flux_hook = [](std::size_t i, FrameComponents& f) { f.along[i] *= 2.0; };
  MetricParams doubled = m;
  doubled.d_s = 2.0;
  CHECK(oracle::rel_sup_diff(rhs(u, spec, m).values(), rhs(u, make_spec(FlowVariant::diffusion, 0.1), doubled).values()) <=
        1e-13);
  spec.flux_hook = [](std::size_t i, FrameComponents& f) {
    f.along[i] = 0.0;
    f.angular[0][i] = 0.0;
  };
  CHECK(sup_norm(rhs(u, spec, m)) == 0.0);
}

TEST_CASE("Perona-Malik with a large contrast parameter is diffusion") {
  const auto g = LiftedGrid::planar(8, 8, 8);
  const MetricParams m{1.0, 0.1, 0.2, 0.0};
  const auto u = random_field(g, 6);
  FlowSpec pm = make_spec(FlowVariant::perona_malik, 0.1);
  pm.pm_k = 1e5;
  CHECK(oracle::rel_sup_diff(rhs(u, pm, m).values(), rhs(u, make_spec(FlowVariant::diffusion, 0.1), m).values()) <= 1e-8);
  pm.pm_k = 0.1;
  // Edge-stopping: a small K damps the response.
  double a = 0.0;
  double b = 0.0;
  const auto damped = rhs(u, pm, m);
  const auto plain = rhs(u, make_spec(FlowVariant::diffusion, 0.1), m);
  for (double r : damped.values()) a += r * r;
  for (double r : plain.values()) b += r * r;
  CHECK(a < b);
}

}  // TEST_SUITE
