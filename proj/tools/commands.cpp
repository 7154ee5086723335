#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "rtflow/errors.hpp"
#include "rtflow/flow.hpp"
#include "rtflow/fodf.hpp"
#include "rtflow/gradient_flow.hpp"
#include "rtflow/image_io.hpp"
#include "rtflow/lifted_io.hpp"
#include "rtflow/metrics.hpp"
#include "rtflow/orientation_score.hpp"
#include "rtflow/sphere_grid.hpp"
#include "rtflow/synthetic.hpp"

namespace rtflow::cli {

namespace fs = std::filesystem;

namespace {

// Noise uses its own stream so that adding noise does not change the
// synthetic signal drawn from the same seed.
constexpr std::uint64_t kNoiseStream = 0x9e3779b97f4a7c15ULL;
constexpr double kBandLimit = 0.5;

std::ofstream open_output(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  return os;
}

std::uint64_t noise_seed(const RunConfig& cfg) {
  return static_cast<std::uint64_t>(cfg.get_int("seed")) ^ kNoiseStream;
}

void require_dim(const RunConfig& cfg, int d, std::string_view what) {
  if (cfg.is_set("d") && cfg.get_int("d") != d) {
    throw ConfigError(std::string(what) + " requires d=" + std::to_string(d) + ", but d=" + cfg.get("d"));
  }
}

LiftedField with_boundary(LiftedField u, Boundary b) {
  LiftedGrid g = u.grid();
  g.boundary = b;
  return LiftedField(g, std::move(u.storage()));
}

Image source_image(const RunConfig& cfg) {
  const std::string& phantom = cfg.get("phantom");
  Image f;
  if (!cfg.get("input").empty()) {
    f = read_image_file(cfg.get("input"));
  } else if (phantom == "crossing") {
    f = crossing_curves_image(cfg.get_size("nx"));
  } else if (phantom == "bandlimited") {
    f = band_limited_image(cfg.get_size("nx"), cfg.get_size("ny"), kBandLimit,
                           static_cast<std::uint64_t>(cfg.get_int("seed")));
  } else {
    throw ConfigError("no input image: set 'input' or phantom=crossing|bandlimited (phantom='" + phantom + "')");
  }
  add_gaussian_noise(f.data, cfg.get_double("noise.sigma"), noise_seed(cfg));
  return f;
}

struct FieldSource {
  LiftedField field;
  std::optional<LiftedField> clean;  // synthetic inputs only
};

FieldSource source_field(const RunConfig& cfg) {
  const Boundary bc = cfg.boundary();
  const std::string& phantom = cfg.get("phantom");
  FieldSource src;
  if (!cfg.get("input").empty()) {
    src.field = with_boundary(read_lifted_file(cfg.get("input")), bc);
    if (cfg.is_set("d") && cfg.get_int("d") != src.field.grid().dim) {
      throw ConfigError("key 'd' is " + cfg.get("d") + " but the input field has d=" +
                        std::to_string(src.field.grid().dim));
    }
    if (cfg.get_double("noise.sigma") > 0.0) {
      add_gaussian_noise(src.field.values(), cfg.get_double("noise.sigma"), noise_seed(cfg));
    }
    return src;
  }

  LiftedField clean;
  const double kappa = cfg.get_double("phantom.kappa");
  const double angle = cfg.get_double("phantom.angle");
  const double radius = cfg.get_double("phantom.radius");
  if (phantom == "bars") {
    require_dim(cfg, 2, "phantom 'bars'");
    clean = crossing_bars_field(cfg.get_size("nx"), cfg.get_size("ntheta"), angle, radius, kappa);
  } else if (phantom == "two_bundle") {
    require_dim(cfg, 3, "phantom 'two_bundle'");
    clean = two_bundle_phantom(cfg.get_size("nx"), build_icosphere(static_cast<int>(cfg.get_int("subdiv"))), angle,
                               radius, kappa)
                .field;
  } else if (phantom == "crossing" || phantom == "bandlimited") {
    require_dim(cfg, 2, "phantom '" + phantom + "'");
    RunConfig quiet = cfg;
    quiet.set("noise.sigma", "0");
    clean = lift(source_image(quiet), build_cake_wavelets(cfg.cake()), bc);
  } else {
    throw ConfigError("no input field: set 'input' or phantom=bars|two_bundle|crossing|bandlimited (phantom='" +
                      phantom + "')");
  }
  clean = with_boundary(std::move(clean), bc);
  src.field = clean;
  add_gaussian_noise(src.field.values(), cfg.get_double("noise.sigma"), noise_seed(cfg));
  src.clean = std::move(clean);
  return src;
}

std::string snapshot_name(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%04zu.lif", k);
  return buf;
}

void write_trace(const fs::path& path, const std::vector<TracePoint>& trace, std::string_view what) {
  std::ofstream os = open_output(path);
  os << "# t " << what << '\n' << std::setprecision(17);
  for (const auto& p : trace) os << p.time << ' ' << p.value << '\n';
}

void write_trajectory(const Job& j, const FlowTrajectory& traj) {
  std::ofstream index = open_output(j.out_dir / "index.txt");
  index << "# index t step file\n" << std::setprecision(17);
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const Snapshot& s = traj.snapshots[k];
    const std::string name = snapshot_name(k);
    write_lifted_file(j.out_dir / name, s.field);
    index << k << ' ' << s.time << ' ' << s.step << ' ' << name << '\n';
  }
  write_lifted_file(j.out_dir / "final.lif", traj.final_field());
  write_trace(j.out_dir / "energy.txt", traj.energy_trace, "tv_eps");
  write_trace(j.out_dir / "mass.txt", traj.mass_trace, "mass");
}

struct RunResult {
  FlowTrajectory traj;
  FlowSpec spec;
};

RunResult run_flow(const RunConfig& cfg, const LiftedField& u, const MetricParams& m) {
  RunResult r;
  r.spec = cfg.flow_spec(u.grid(), m);
  r.traj = FlowEngine(u.grid(), m, r.spec).run(u);
  return r;
}

void report_run(const Job& j, const RunResult& r) {
  j.out << "flow " << to_string(r.spec.variant) << ": " << r.traj.steps << " steps of dt=" << r.spec.dt
        << ", " << r.traj.snapshots.size() << " snapshot(s) in " << j.out_dir.string() << '\n';
}

void write_curve(const Job& j, const fs::path& path, const ErrorCurve& c) {
  std::ofstream os = open_output(path);
  write_error_curve(os, c);
  const ErrorPoint& best = c.minimum();
  j.out << to_string(c.kind) << " error: t=0 -> " << c.points.front().error << ", minimum " << best.error
        << " at t=" << best.t << " (" << path.string() << ")\n";
}

int cmd_lift(const Job& j) {
  const Image f = source_image(j.cfg);
  const std::size_t pad = j.cfg.get_size("pad");
  const WaveletStack w = build_cake_wavelets(j.cfg.cake());
  const LiftedField u = lift(pad_reflect(f, pad), w, j.cfg.boundary());
  write_pfm_file(j.out_dir / "input.pfm", f);
  write_lifted_file(j.out_dir / "lifted.lif", u);
  j.out << "lifted " << f.nx << 'x' << f.ny << " image (padding " << pad << ") into " << w.n_orientations()
        << " orientations\n";
  return kOk;
}

int cmd_reconstruct(const Job& j) {
  if (j.cfg.get("input").empty()) throw ConfigError("reconstruct needs key 'input' (a lifted field)");
  const LiftedField u = read_lifted_file(j.cfg.get("input"));
  const WaveletStack w = build_cake_wavelets(j.cfg.cake());
  const Image f = crop(reconstruct(u, w), j.cfg.get_size("pad"));
  write_pfm_file(j.out_dir / "reconstructed.pfm", f);
  j.out << "reconstructed " << f.nx << 'x' << f.ny << " image\n";
  return kOk;
}

int cmd_enhance(const Job& j) {
  require_dim(j.cfg, 2, "enhance");
  const Image f = source_image(j.cfg);
  const std::size_t pad = j.cfg.get_size("pad");
  const Image padded = pad_reflect(f, pad);
  const WaveletStack w = build_cake_wavelets(j.cfg.cake());
  const Boundary bc = j.cfg.boundary();
  const MetricParams m = j.cfg.metric();
  const LiftedGrid grid = LiftedGrid::planar(padded.nx, padded.ny, w.n_orientations(), 1.0, bc);
  const FlowSpec spec = j.cfg.flow_spec(grid, m);
  const Image g = crop(enhance(padded, w, spec, m, bc), pad);
  write_pfm_file(j.out_dir / "input.pfm", f);
  write_pfm_file(j.out_dir / "enhanced.pfm", g);
  j.out << "enhanced " << f.nx << 'x' << f.ny << " image with " << to_string(spec.variant) << " to t="
        << spec.t_end << " (" << spec.step_count() << " steps)\n";
  return kOk;
}

int cmd_flow(const Job& j) {
  const FieldSource src = source_field(j.cfg);
  const MetricParams m = j.cfg.metric();
  const RunResult r = run_flow(j.cfg, src.field, m);
  if (src.clean) {
    write_lifted_file(j.out_dir / "clean.lif", *src.clean);
    write_lifted_file(j.out_dir / "initial.lif", src.field);
  }
  write_trajectory(j, r.traj);
  report_run(j, r);
  return kOk;
}

int cmd_denoise_fodf(const Job& j) {
  require_dim(j.cfg, 3, "denoise-fodf");
  const MetricParams m = j.cfg.metric();
  FieldSource src;
  if (!j.cfg.get("input").empty()) {
    const auto sphere = build_icosphere(static_cast<int>(j.cfg.get_int("subdiv")));
    std::ifstream is(j.cfg.get("input"), std::ios::binary);
    if (!is) throw FormatError("cannot open " + j.cfg.get("input"));
    FodfIngestOptions opt;
    opt.symmetrize = j.cfg.get_bool("symmetrize");
    opt.h = j.cfg.get_double("h");
    FodfIngestResult in = ingest_fodf(is, sphere, opt);
    j.out << "ingested " << in.field.grid().spatial_size() << " voxels x " << sphere->size()
          << " orientations, clamped " << in.clamped << " negative value(s)\n";
    src.field = with_boundary(std::move(in.field), j.cfg.boundary());
    add_gaussian_noise(src.field.values(), j.cfg.get_double("noise.sigma"), noise_seed(j.cfg));
  } else {
    src = source_field(j.cfg);
    if (src.field.grid().dim != 3) throw ConfigError("denoise-fodf needs a d=3 field (phantom=two_bundle)");
    if (j.cfg.get_bool("symmetrize")) symmetrize_antipodal(src.field);
  }

  const RunResult r = run_flow(j.cfg, src.field, m);
  write_lifted_file(j.out_dir / "initial.lif", src.field);
  write_trajectory(j, r.traj);
  {
    std::ofstream os = open_output(j.out_dir / "denoised.fodf");
    write_fodf_table(os, r.traj.final_field());
  }
  report_run(j, r);
  if (src.clean) {
    write_lifted_file(j.out_dir / "clean.lif", *src.clean);
    std::vector<Snapshot> snaps;
    snaps.push_back({0.0, 0, src.field});
    snaps.insert(snaps.end(), r.traj.snapshots.begin(), r.traj.snapshots.end());
    const ErrorCurve c = compute_error_curve(snaps, *src.clean, parse_error_kind(j.cfg.get("error")), m);
    write_curve(j, j.out_dir / "error.txt", c);
  }
  return kOk;
}

int cmd_icosphere(const Job& j) {
  const auto s = build_icosphere(static_cast<int>(j.cfg.get_int("subdiv")));
  std::ofstream os = open_output(j.out_dir / "icosphere.txt");
  os << "# index x y z weight\n";
  write_sampling_text(os, *s);
  double total = 0.0;
  for (double w : s->weights()) total += w;
  j.out << std::setprecision(12) << "icosphere subdiv=" << s->subdivision() << " N_A=" << s->size()
        << " edges=" << s->edge_count() << " faces=" << s->faces().size() << " h_a=" << s->h_a()
        << " weight_sum=" << total << '\n';
  return kOk;
}

std::vector<Snapshot> read_snapshots(const fs::path& input) {
  std::vector<Snapshot> snaps;
  if (input.extension() != ".txt") {
    snaps.push_back({0.0, 0, read_lifted_file(input)});
    return snaps;
  }
  std::ifstream is(input);
  if (!is) throw FormatError("cannot open " + input.string());
  std::string line;
  std::uint64_t offset = 0;
  while (std::getline(is, line)) {
    const std::uint64_t at = offset;
    offset += line.size() + 1;
    if (line.empty() || line.front() == '#') continue;
    std::istringstream ls(line);
    std::size_t k = 0;
    Snapshot s;
    std::string file;
    if (!(ls >> k >> s.time >> s.step >> file)) throw FormatError("malformed index line '" + line + "'", at);
    s.field = read_lifted_file(input.parent_path() / file);
    snaps.push_back(std::move(s));
  }
  if (snaps.empty()) throw FormatError("index " + input.string() + " lists no snapshots");
  return snaps;
}

int cmd_metrics(const Job& j) {
  if (j.cfg.get("input").empty()) throw ConfigError("metrics needs key 'input' (index.txt or a .lif file)");
  if (j.cfg.get("reference").empty()) throw ConfigError("metrics needs key 'reference' (a .lif file)");
  const std::vector<Snapshot> snaps = read_snapshots(j.cfg.get("input"));
  const LiftedField ref = read_lifted_file(j.cfg.get("reference"));
  const ErrorCurve c = compute_error_curve(snaps, ref, parse_error_kind(j.cfg.get("error")), j.cfg.metric());
  write_curve(j, j.out_dir / "error.txt", c);
  return kOk;
}

int cmd_verify(const Job& j) {
  const std::string& suite = j.cfg.get("verify.suite");
  if (suite != "all" && suite != "theorem1" && suite != "theorem2" && suite != "proposition" && suite != "lemma") {
    throw ConfigError("key 'verify.suite' expects theorem1, theorem2, proposition, lemma or all, got '" + suite + "'");
  }
  auto wants = [&](std::string_view s) { return suite == "all" || suite == s; };
  const std::size_t n = j.cfg.get_size("verify.size");
  const std::size_t count = j.cfg.get_size("verify.instances");
  const double t = j.cfg.get_double("verify.t");
  const double e1 = j.cfg.get_double("verify.eps1");
  const double e2 = j.cfg.get_double("verify.eps2");
  const auto seed = static_cast<std::uint64_t>(j.cfg.get_int("seed"));
  MetricParams m = j.cfg.metric();
  const LiftedGrid grid = LiftedGrid::planar(n, n, n, j.cfg.get_double("h"), j.cfg.boundary());
  OracleOptions opt;
  opt.interp = j.cfg.interpolation();
  const Measure mu(grid, m);

  std::ofstream records = open_output(j.out_dir / "verify.txt");
  std::size_t failed = 0;
  auto emit = [&](std::size_t instance, const BoundCheckReport& r) {
    const std::string line = "instance=" + std::to_string(instance) + ' ' + r.to_record();
    records << line << '\n';
    j.out << line << '\n';
    if (!r.passed()) ++failed;
  };

  for (std::size_t i = 0; i < count; ++i) {
    LiftedField u = random_field(grid, seed + i);
    const double norm = mu.norm(u);
    if (norm > 1.0)
      for (double& v : u.values()) v /= norm;
    if (wants("theorem1")) emit(i, check_theorem1(u, {e1, e2}, t, m, opt));
    if (wants("theorem2") || wants("proposition")) {
      Theorem2Setup s{u, u, e1, e2, t, m};
      const LiftedField bump = random_field(grid, seed + 1000 + i, -0.05, 0.05);
      for (std::size_t k = 0; k < u.size(); ++k) s.v0[k] += bump[k];
      const BoundCheckReport t2 = check_theorem2(s, opt);
      if (wants("theorem2")) emit(i, t2);
      if (wants("proposition")) emit(i, check_proposition(s, t2));
    }
    if (wants("lemma")) {
      MetricParams mp = m;
      mp.eps = e1;
      LemmaProbeOptions lo;
      lo.seed = seed + 2000 + 100 * i;
      lo.interp = opt.interp;
      emit(i, check_lemma(u, t, mp, lo));
    }
  }
  j.out << (failed == 0 ? "all checks passed" : std::to_string(failed) + " check(s) failed") << '\n';
  return failed == 0 ? kOk : kCheckFailed;
}

}  // namespace

int run_command(std::string_view name, const Job& job) {
  if (name == "lift") return cmd_lift(job);
  if (name == "flow") return cmd_flow(job);
  if (name == "reconstruct") return cmd_reconstruct(job);
  if (name == "enhance") return cmd_enhance(job);
  if (name == "denoise-fodf") return cmd_denoise_fodf(job);
  if (name == "icosphere") return cmd_icosphere(job);
  if (name == "metrics") return cmd_metrics(job);
  if (name == "verify") return cmd_verify(job);
  throw ConfigError("unknown subcommand '" + std::string(name) + "'");
}

}  // namespace rtflow::cli
