#pragma once

#include <filesystem>
#include <iosfwd>

#include "rtflow/image.hpp"

namespace rtflow {

/// Binary PGM (P5), 8 or 16 bit. Samples are scaled to [0, 1] by maxval.
Image read_pgm(std::istream& is);
Image read_pgm_file(const std::filesystem::path& path);
/// Values are clamped to [0, 1] and quantized to 8 bits.
void write_pgm(std::ostream& os, const Image& f);

/// Grayscale PFM ("Pf"), little-endian (negative scale), rows stored bottom-up.
void write_pfm(std::ostream& os, const Image& f);
void write_pfm_file(const std::filesystem::path& path, const Image& f);
Image read_pfm(std::istream& is);
Image read_pfm_file(const std::filesystem::path& path);

/// Reads PGM or PFM by magic number.
Image read_image_file(const std::filesystem::path& path);

}  // namespace rtflow
