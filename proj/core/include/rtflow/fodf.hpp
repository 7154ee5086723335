#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>

#include "rtflow/lifted_field.hpp"
#include "rtflow/sphere_grid.hpp"

namespace rtflow {

// Plain-text FODF table:
//   nx ny nz na                      (first non-comment line)
//   ix iy iz v_0 v_1 ... v_{na-1}     (one line per voxel, any order)
// Lines starting with '#' are comments. Voxels that are not listed stay 0.

struct FodfIngestOptions {
  bool symmetrize = false;  // average U(x, n) and U(x, -n)
  double h = 1.0;
};

struct FodfIngestResult {
  LiftedField field;
  std::size_t clamped = 0;  // negative inputs set to 0
};

/// Throws FormatError (byte offset of the offending line) on malformed rows,
/// out-of-range voxels, duplicate voxels or a vertex count that differs from
/// the sampling; ConfigError when symmetrizing a sampling that is not
/// antipodally closed.
FodfIngestResult ingest_fodf(std::istream& is, std::shared_ptr<const SphereSampling> sphere,
                             const FodfIngestOptions& opt = {});

/// Writes every voxel of a d=3 field in the table format (17 significant digits).
void write_fodf_table(std::ostream& os, const LiftedField& u);

/// U(x, n) <- (U(x, n) + U(x, -n)) / 2 in place.
void symmetrize_antipodal(LiftedField& u);

}  // namespace rtflow
