#include "rtflow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "rtflow/errors.hpp"

namespace rtflow {

ErrorKind parse_error_kind(std::string_view name) {
  if (name == "l2_abs") return ErrorKind::l2_abs;
  if (name == "l1_rel") return ErrorKind::l1_rel;
  throw ConfigError("unknown error kind '" + std::string(name) + "' (expected l2_abs or l1_rel)");
}

std::string_view to_string(ErrorKind k) { return k == ErrorKind::l2_abs ? "l2_abs" : "l1_rel"; }

const ErrorPoint& ErrorCurve::minimum() const {
  if (points.empty()) throw ConfigError("empty error curve");
  return *std::min_element(points.begin(), points.end(),
                           [](const ErrorPoint& a, const ErrorPoint& b) { return a.error < b.error; });
}

double field_error(const LiftedField& w, const LiftedField& ref, ErrorKind kind, const MetricParams& m) {
  if (!w.grid().same_shape(ref.grid())) throw ConfigError("field and reference have different shapes");
  const Measure mu(ref.grid(), m);
  if (kind == ErrorKind::l2_abs) return mu.distance(w, ref);
  LiftedField diff(ref.grid());
  LiftedField mag(ref.grid());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    diff[i] = std::abs(w[i] - ref[i]);
    mag[i] = std::abs(ref[i]);
  }
  const double denom = mu.integrate(mag);
  if (denom == 0.0) throw ConfigError("relative L1 error against a zero reference");
  return mu.integrate(diff) / denom;
}

ErrorCurve compute_error_curve(std::span<const Snapshot> snapshots, const LiftedField& ref, ErrorKind kind,
                               const MetricParams& m) {
  ErrorCurve c;
  c.kind = kind;
  for (const auto& s : snapshots) {
    if (!c.points.empty() && s.time <= c.points.back().t) {
      if (s.time == c.points.back().t) continue;
      throw ConfigError("snapshot times must be non-decreasing");
    }
    c.points.push_back({s.time, field_error(s.field, ref, kind, m)});
  }
  return c;
}

ErrorCurve compute_error_curve(const FlowTrajectory& traj, const LiftedField& ref, ErrorKind kind,
                               const MetricParams& m) {
  return compute_error_curve(std::span<const Snapshot>(traj.snapshots), ref, kind, m);
}

void write_error_curve(std::ostream& os, const ErrorCurve& c) {
  const auto old = os.precision(17);
  os << "# t error (" << to_string(c.kind) << ", weighted by the lifted measure mu)\n";
  for (const auto& p : c.points) os << p.t << ' ' << p.error << '\n';
  os.precision(old);
}

}  // namespace rtflow
