#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "rtflow/lifted_field.hpp"

namespace rtflow {

// LIF1 layout (all little-endian):
//   "LIF1", u8 d,
//   d=2: u32 nx, ny, n_theta
//   d=3: u32 nx, ny, nz, n_a, then n_a x 3 f64 vertices, n_a f64 weights
//   f64 h, f64 h_a, then size() f64 samples in LiftedField index order.
// A d=3 file must carry one of the built-in icospheres bit-exactly.

std::vector<unsigned char> encode_lifted(const LiftedField& u);
/// Throws FormatError (with byte offset) on bad magic, dimension, sphere or length.
LiftedField decode_lifted(std::span<const unsigned char> bytes);

void write_lifted(std::ostream& os, const LiftedField& u);
LiftedField read_lifted(std::istream& is);

void write_lifted_file(const std::filesystem::path& path, const LiftedField& u);
LiftedField read_lifted_file(const std::filesystem::path& path);

/// Byte offset of the first sample in an encoded file.
std::size_t lifted_payload_offset(std::span<const unsigned char> bytes);

}  // namespace rtflow
