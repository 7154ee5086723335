#include "rtflow/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "rtflow/errors.hpp"

namespace rtflow {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

const std::vector<RunConfig::Key>& RunConfig::keys() {
  static const std::vector<Key> table = {
      {"d", "2", "dimension of the spatial part (2 or 3)"},
      {"nx", "64", "grid extent in x (synthetic inputs)"},
      {"ny", "64", "grid extent in y (synthetic inputs)"},
      {"nz", "24", "grid extent in z (synthetic d=3 inputs)"},
      {"ntheta", "16", "orientations for d=2"},
      {"subdiv", "2", "icosphere subdivision level for d=3"},
      {"h", "1", "spatial grid step"},
      {"boundary", "neumann", "spatial boundary: neumann or periodic"},
      {"interp", "linear", "stencil interpolation: linear or bspline"},
      {"ds", "1", "spatial diffusion weight D_S"},
      {"da", "0.01", "angular diffusion weight D_A"},
      {"frac", "0", "anisotropy; 0 selects the sub-Riemannian gradient"},
      {"eps", "0.02", "total-variation regularization"},
      {"variant", "tvf", "diffusion, tvf, mcf or pm"},
      {"a", "", "PDE exponent a (optional, must match variant)"},
      {"b", "", "PDE exponent b (optional, must match variant)"},
      {"dt", "auto", "time step, or auto for 0.9 of the stability bound"},
      {"tend", "1", "final time"},
      {"snapshots", "", "comma-separated snapshot times"},
      {"trace_stride", "1", "steps between energy/mass trace samples"},
      {"pm_k", "0.2", "Perona-Malik contrast K"},
      {"wavelet.norient", "16", "cake wavelet orientations"},
      {"wavelet.size", "33", "cake wavelet kernel size (odd)"},
      {"wavelet.spline_order", "3", "angular B-spline order"},
      {"wavelet.inflection", "1", "radial window inflection point (fraction of Nyquist)"},
      {"wavelet.nyquist_cut", "0.8", "pass band edge (fraction of Nyquist)"},
      {"pad", "0", "reflective image padding in pixels before lifting"},
      {"seed", "1", "seed for synthetic data and noise"},
      {"noise.sigma", "0", "additive Gaussian noise level for synthetic inputs"},
      {"phantom", "none", "synthetic input: none, crossing, bandlimited, bars, two_bundle"},
      {"phantom.kappa", "20", "lobe sharpness of synthetic orientation fields"},
      {"phantom.angle", "60", "crossing angle in degrees for synthetic bundles"},
      {"phantom.radius", "3", "bundle or bar half-width in voxels"},
      {"symmetrize", "false", "antipodal symmetrization of ingested FODFs"},
      {"error", "l2_abs", "error curve kind: l2_abs or l1_rel"},
      {"input", "", "input file"},
      {"reference", "", "reference lifted field for metrics"},
      {"output", "out", "output directory"},
      {"verify.suite", "all", "theorem1, theorem2, proposition, lemma or all"},
      {"verify.size", "8", "grid extent of verification instances (n x n x n)"},
      {"verify.instances", "5", "random instances per verification case"},
      {"verify.t", "0.1", "flow time for verification checks"},
      {"verify.eps1", "0.1", "larger eps of a verification pair"},
      {"verify.eps2", "0.05", "smaller eps of a verification pair"},
  };
  return table;
}

RunConfig::RunConfig() {
  for (const auto& k : keys()) values_.emplace(k.name, Value{k.default_value, false});
}

const RunConfig::Value& RunConfig::find(std::string_view key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  return it->second;
}

void RunConfig::set(std::string_view key, std::string_view value) {
  const auto it = values_.find(trim(key));
  if (it == values_.end()) throw ConfigError("unknown config key '" + std::string(trim(key)) + "'");
  it->second = Value{std::string(trim(value)), true};
}

void RunConfig::set_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
  }
  set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

void RunConfig::load(std::istream& is, std::string_view source) {
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(std::string(source) + ":" + std::to_string(lineno) + ": expected key=value");
    }
    set(t.substr(0, eq), t.substr(eq + 1));
  }
}

void RunConfig::load_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path.string());
  load(is, path.string());
}

const std::string& RunConfig::get(std::string_view key) const { return find(key).text; }

bool RunConfig::is_set(std::string_view key) const { return find(key).explicit_set; }

double RunConfig::get_double(std::string_view key) const {
  const std::string& s = get(key);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError("key '" + std::string(key) + "' expects a number, got '" + s + "'");
  }
  return v;
}

long RunConfig::get_int(std::string_view key) const {
  const std::string& s = get(key);
  long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ConfigError("key '" + std::string(key) + "' expects an integer, got '" + s + "'");
  }
  return v;
}

std::size_t RunConfig::get_size(std::string_view key) const {
  const long v = get_int(key);
  if (v < 0) throw ConfigError("key '" + std::string(key) + "' must be nonnegative");
  return static_cast<std::size_t>(v);
}

bool RunConfig::get_bool(std::string_view key) const {
  const std::string& s = get(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("key '" + std::string(key) + "' expects true or false, got '" + s + "'");
}

std::vector<double> RunConfig::get_list(std::string_view key) const {
  const std::string& s = get(key);
  std::vector<double> out;
  std::string_view rest = s;
  while (!trim(rest).empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = trim(rest.substr(0, comma));
    double v = 0.0;
    const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || p != item.data() + item.size()) {
      throw ConfigError("key '" + std::string(key) + "' expects comma-separated numbers, got '" + s + "'");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

void RunConfig::write(std::ostream& os) const {
  for (const auto& k : keys()) os << k.name << '=' << get(k.name) << '\n';
}

MetricParams RunConfig::metric() const {
  MetricParams m;
  m.d_s = get_double("ds");
  m.d_a = get_double("da");
  m.frac = get_double("frac");
  m.eps = get_double("eps");
  m.validate();
  return m;
}

FlowSpec RunConfig::flow_spec(const LiftedGrid& grid, const MetricParams& m) const {
  FlowSpec spec;
  spec.variant = parse_flow_variant(get("variant"));
  const bool has_a = !get("a").empty();
  const bool has_b = !get("b").empty();
  if (has_a != has_b) throw ConfigError("keys 'a' and 'b' must be given together");
  if (has_a) {
    const FlowVariant from_ab = variant_from_exponents(static_cast<int>(get_int("a")), static_cast<int>(get_int("b")));
    if (is_set("variant") && from_ab != spec.variant) {
      throw ConfigError("exponents (a, b) = (" + get("a") + ", " + get("b") + ") contradict variant '" +
                        get("variant") + "'");
    }
    spec.variant = from_ab;
  }
  spec.pm_k = get_double("pm_k");
  spec.t_end = get_double("tend");
  spec.snapshot_times = get_list("snapshots");
  spec.trace_stride = get_size("trace_stride");
  spec.interp = interpolation();
  spec.dt = get("dt") == "auto" ? stable_dt(spec.variant, m, grid) : get_double("dt");
  spec.validate();
  check_step_size(spec, m, grid);
  return spec;
}

CakeParams RunConfig::cake() const {
  CakeParams p;
  p.n_orientations = get_size("wavelet.norient");
  p.size = get_size("wavelet.size");
  p.spline_order = static_cast<int>(get_int("wavelet.spline_order"));
  p.inflection = get_double("wavelet.inflection");
  p.nyquist_cut = get_double("wavelet.nyquist_cut");
  return p;
}

Interpolation RunConfig::interpolation() const {
  const std::string& s = get("interp");
  if (s == "linear") return Interpolation::linear;
  if (s == "bspline") return Interpolation::cubic_bspline;
  throw ConfigError("key 'interp' expects linear or bspline, got '" + s + "'");
}

Boundary RunConfig::boundary() const {
  const std::string& s = get("boundary");
  if (s == "neumann") return Boundary::neumann;
  if (s == "periodic") return Boundary::periodic;
  throw ConfigError("key 'boundary' expects neumann or periodic, got '" + s + "'");
}

}  // namespace rtflow
