#pragma once

#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "rtflow/flow.hpp"
#include "rtflow/lifted_field.hpp"
#include "rtflow/metric.hpp"

namespace rtflow {

enum class ErrorKind {
  l2_abs,  // sqrt(∫(W - ref)² dμ)
  l1_rel,  // ∫|W - ref| dμ / ∫|ref| dμ
};

ErrorKind parse_error_kind(std::string_view name);
std::string_view to_string(ErrorKind k);

struct ErrorPoint {
  double t = 0.0;
  double error = 0.0;
};

struct ErrorCurve {
  ErrorKind kind = ErrorKind::l2_abs;
  std::vector<ErrorPoint> points;  // strictly increasing t

  /// Point with the smallest error (first one on ties).
  const ErrorPoint& minimum() const;
};

/// Error of a single field against a reference, with μ weights.
double field_error(const LiftedField& w, const LiftedField& ref, ErrorKind kind, const MetricParams& m);

/// One point per snapshot; repeated snapshot times are collapsed. Throws
/// ConfigError on shape mismatch or an l1_rel reference with zero mass.
ErrorCurve compute_error_curve(std::span<const Snapshot> snapshots, const LiftedField& ref, ErrorKind kind,
                               const MetricParams& m);
ErrorCurve compute_error_curve(const FlowTrajectory& traj, const LiftedField& ref, ErrorKind kind,
                               const MetricParams& m);

/// Two-column text ("t error") behind a comment header naming the kind and weighting.
void write_error_curve(std::ostream& os, const ErrorCurve& c);

}  // namespace rtflow
