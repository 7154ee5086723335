#include "rtflow/image_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <string>
#include <vector>

#include "rtflow/errors.hpp"

namespace rtflow {

namespace {

// Netpbm-style header token reader that tracks the byte offset and skips comments.
class HeaderScanner {
 public:
  explicit HeaderScanner(std::istream& is) : is_(is) {}

  std::string token() {
    int c = next();
    for (;;) {
      if (c == '#') {
        while (c != '\n' && c != EOF) c = next();
      }
      if (c == EOF) throw FormatError("unexpected end of header", pos_);
      if (!std::isspace(c)) break;
      c = next();
    }
    std::string t;
    while (c != EOF && !std::isspace(c)) {
      t.push_back(static_cast<char>(c));
      c = next();
    }
    return t;
  }

  long number(const char* what) {
    const std::size_t at = pos_;
    const std::string t = token();
    try {
      std::size_t used = 0;
      const long v = std::stol(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      throw FormatError(std::string("bad ") + what + " '" + t + "'", at);
    }
  }

  double real(const char* what) {
    const std::size_t at = pos_;
    const std::string t = token();
    try {
      std::size_t used = 0;
      const double v = std::stod(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      throw FormatError(std::string("bad ") + what + " '" + t + "'", at);
    }
  }

  std::size_t offset() const { return pos_; }

 private:
  int next() {
    ++pos_;
    return is_.get();
  }

  std::istream& is_;
  std::size_t pos_ = 0;
};

std::vector<unsigned char> read_rest(std::istream& is) {
  return std::vector<unsigned char>((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
}

void check_extent(long v, const char* what, std::size_t at) {
  if (v <= 0 || v > (1L << 20)) throw FormatError(std::string("invalid ") + what + " " + std::to_string(v), at);
}

}  // namespace

Image read_pgm(std::istream& is) {
  HeaderScanner hs(is);
  if (hs.token() != "P5") throw FormatError("not a binary PGM (expected P5)", 0);
  std::size_t at = hs.offset();
  const long w = hs.number("width");
  check_extent(w, "width", at);
  at = hs.offset();
  const long h = hs.number("height");
  check_extent(h, "height", at);
  at = hs.offset();
  const long maxval = hs.number("maxval");
  if (maxval <= 0 || maxval > 65535) throw FormatError("invalid maxval " + std::to_string(maxval), at);

  const std::size_t bps = maxval < 256 ? 1 : 2;
  Image f(static_cast<std::size_t>(w), static_cast<std::size_t>(h));
  const auto data = read_rest(is);
  const std::size_t need = f.size() * bps;
  if (data.size() < need) {
    throw FormatError("truncated PGM: need " + std::to_string(need) + " sample bytes, have " +
                          std::to_string(data.size()),
                      hs.offset() + data.size());
  }
  const double scale = 1.0 / static_cast<double>(maxval);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const unsigned v = bps == 1 ? data[i] : (static_cast<unsigned>(data[2 * i]) << 8) | data[2 * i + 1];
    f.data[i] = v * scale;
  }
  return f;
}

Image read_pgm_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  return read_pgm(is);
}

void write_pgm(std::ostream& os, const Image& f) {
  os << "P5\n" << f.nx << ' ' << f.ny << "\n255\n";
  for (double v : f.data) {
    const double c = std::clamp(v, 0.0, 1.0);
    os.put(static_cast<char>(static_cast<unsigned char>(std::lround(c * 255.0))));
  }
  if (!os) throw FormatError("write failed");
}

void write_pfm(std::ostream& os, const Image& f) {
  os << "Pf\n" << f.nx << ' ' << f.ny << "\n-1.0\n";
  for (std::size_t row = f.ny; row-- > 0;) {
    for (std::size_t x = 0; x < f.nx; ++x) {
      const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(f.at(x, row)));
      for (int k = 0; k < 4; ++k) os.put(static_cast<char>(static_cast<unsigned char>(bits >> (8 * k))));
    }
  }
  if (!os) throw FormatError("write failed");
}

void write_pfm_file(const std::filesystem::path& path, const Image& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  write_pfm(os, f);
}

Image read_pfm(std::istream& is) {
  HeaderScanner hs(is);
  if (hs.token() != "Pf") throw FormatError("not a grayscale PFM (expected Pf)", 0);
  std::size_t at = hs.offset();
  const long w = hs.number("width");
  check_extent(w, "width", at);
  at = hs.offset();
  const long h = hs.number("height");
  check_extent(h, "height", at);
  at = hs.offset();
  const double scale = hs.real("scale");
  if (scale == 0.0 || !std::isfinite(scale)) throw FormatError("invalid PFM scale", at);
  const bool little = scale < 0.0;

  Image f(static_cast<std::size_t>(w), static_cast<std::size_t>(h));
  const auto data = read_rest(is);
  if (data.size() < 4 * f.size()) {
    throw FormatError("truncated PFM: need " + std::to_string(4 * f.size()) + " sample bytes, have " +
                          std::to_string(data.size()),
                      hs.offset() + data.size());
  }
  std::size_t i = 0;
  for (std::size_t row = f.ny; row-- > 0;) {
    for (std::size_t x = 0; x < f.nx; ++x, ++i) {
      std::uint32_t bits = 0;
      for (int k = 0; k < 4; ++k) {
        const int shift = little ? 8 * k : 8 * (3 - k);
        bits |= static_cast<std::uint32_t>(data[4 * i + k]) << shift;
      }
      f.at(x, row) = std::bit_cast<float>(bits);
    }
  }
  return f;
}

Image read_pfm_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  return read_pfm(is);
}

Image read_image_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  char magic[2] = {0, 0};
  is.read(magic, 2);
  is.seekg(0);
  if (magic[0] == 'P' && magic[1] == '5') return read_pgm(is);
  if (magic[0] == 'P' && magic[1] == 'f') return read_pfm(is);
  throw FormatError(path.string() + ": unsupported image format (expected P5 PGM or Pf PFM)", 0);
}

}  // namespace rtflow
