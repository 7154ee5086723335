#include "rtflow/lifted_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "rtflow/errors.hpp"
#include "rtflow/sphere_grid.hpp"

namespace rtflow {

namespace {

constexpr char kMagic[4] = {'L', 'I', 'F', '1'};

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<unsigned char>(v >> (8 * k)));
}

void put_f64(std::vector<unsigned char>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int k = 0; k < 8; ++k) out.push_back(static_cast<unsigned char>(bits >> (8 * k)));
}

class Reader {
 public:
  explicit Reader(std::span<const unsigned char> b) : bytes_(b) {}

  std::size_t offset() const { return pos_; }

  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) {
      throw FormatError(std::string("truncated file while reading ") + what + ": need " +
                            std::to_string(pos_ + n) + " bytes, have " + std::to_string(bytes_.size()),
                        pos_);
    }
  }
  std::uint8_t u8(const char* what) {
    need(1, what);
    return bytes_[pos_++];
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(bytes_[pos_ + k]) << (8 * k);
    pos_ += 4;
    return v;
  }
  double f64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(bytes_[pos_ + k]) << (8 * k);
    pos_ += 8;
    return std::bit_cast<double>(v);
  }

 private:
  std::span<const unsigned char> bytes_;
  std::size_t pos_ = 0;
};

struct Header {
  LiftedGrid grid;
  std::size_t payload = 0;
};

Header parse_header(std::span<const unsigned char> bytes) {
  Reader r(bytes);
  r.need(4, "magic");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("bad magic, expected LIF1", 0);
  for (int k = 0; k < 4; ++k) r.u8("magic");
  const std::size_t dim_at = r.offset();
  const int d = r.u8("dimension");
  if (d != 2 && d != 3) throw FormatError("unsupported dimension " + std::to_string(d), dim_at);

  Header hd;
  LiftedGrid& g = hd.grid;
  g.dim = d;
  g.nx = r.u32("nx");
  g.ny = r.u32("ny");
  if (d == 2) {
    g.nz = 1;
    g.n_orient = r.u32("n_theta");
  } else {
    g.nz = r.u32("nz");
    const std::size_t na_at = r.offset();
    g.n_orient = r.u32("n_a");
    std::shared_ptr<const SphereSampling> match;
    for (int level = 0; level <= SphereSampling::max_subdivision; ++level) {
      // vertex counts 10·4^k + 2
      const std::size_t count = 10 * (std::size_t{1} << (2 * level)) + 2;
      if (count == g.n_orient) match = build_icosphere(level);
    }
    if (!match) {
      throw FormatError("n_a = " + std::to_string(g.n_orient) + " is not an icosphere vertex count", na_at);
    }
    for (std::size_t i = 0; i < g.n_orient; ++i) {
      for (int c = 0; c < 3; ++c) {
        const std::size_t at = r.offset();
        const double v = r.f64("sphere vertices");
        if (std::bit_cast<std::uint64_t>(v) != std::bit_cast<std::uint64_t>(match->vertex(i)[c])) {
          throw FormatError("sphere vertex " + std::to_string(i) + " does not match the built-in icosphere", at);
        }
      }
    }
    for (std::size_t i = 0; i < g.n_orient; ++i) {
      const std::size_t at = r.offset();
      const double w = r.f64("sphere weights");
      if (std::bit_cast<std::uint64_t>(w) != std::bit_cast<std::uint64_t>(match->weights()[i])) {
        throw FormatError("sphere weight " + std::to_string(i) + " does not match the built-in icosphere", at);
      }
    }
    g.sphere = match;
  }
  const std::size_t h_at = r.offset();
  g.h = r.f64("h");
  g.h_a = r.f64("h_a");
  try {
    g.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("inconsistent header: ") + e.what(), h_at);
  }
  hd.payload = r.offset();
  return hd;
}

}  // namespace

std::vector<unsigned char> encode_lifted(const LiftedField& u) {
  const LiftedGrid& g = u.grid();
  std::vector<unsigned char> out;
  out.reserve(64 + 8 * u.size());
  out.insert(out.end(), kMagic, kMagic + 4);
  out.push_back(static_cast<unsigned char>(g.dim));
  put_u32(out, static_cast<std::uint32_t>(g.nx));
  put_u32(out, static_cast<std::uint32_t>(g.ny));
  if (g.dim == 2) {
    put_u32(out, static_cast<std::uint32_t>(g.n_orient));
  } else {
    put_u32(out, static_cast<std::uint32_t>(g.nz));
    put_u32(out, static_cast<std::uint32_t>(g.n_orient));
    for (std::size_t i = 0; i < g.n_orient; ++i)
      for (int c = 0; c < 3; ++c) put_f64(out, g.sphere->vertex(i)[c]);
    for (double w : g.sphere->weights()) put_f64(out, w);
  }
  put_f64(out, g.h);
  put_f64(out, g.h_a);
  for (double v : u.values()) put_f64(out, v);
  return out;
}

std::size_t lifted_payload_offset(std::span<const unsigned char> bytes) { return parse_header(bytes).payload; }

LiftedField decode_lifted(std::span<const unsigned char> bytes) {
  Header hd = parse_header(bytes);
  const std::size_t n = hd.grid.size();
  const std::size_t expected = hd.payload + 8 * n;
  if (bytes.size() != expected) {
    throw FormatError("file length " + std::to_string(bytes.size()) + " does not match the expected " +
                          std::to_string(expected) + " bytes",
                      std::min(bytes.size(), expected));
  }
  Reader r(bytes.subspan(hd.payload));
  std::vector<double> values(n);
  for (double& v : values) v = r.f64("samples");
  return LiftedField(std::move(hd.grid), std::move(values));
}

void write_lifted(std::ostream& os, const LiftedField& u) {
  const auto bytes = encode_lifted(u);
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw FormatError("write failed");
}

LiftedField read_lifted(std::istream& is) {
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return decode_lifted(bytes);
}

void write_lifted_file(const std::filesystem::path& path, const LiftedField& u) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  write_lifted(os, u);
}

LiftedField read_lifted_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  return read_lifted(is);
}

}  // namespace rtflow
