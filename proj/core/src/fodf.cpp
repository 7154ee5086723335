#include "rtflow/fodf.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rtflow/errors.hpp"

namespace rtflow {

void symmetrize_antipodal(LiftedField& u) {
  const LiftedGrid& g = u.grid();
  if (g.dim != 3 || !g.sphere->antipodally_closed()) {
    throw ConfigError("antipodal symmetrization needs an antipodally closed sphere sampling");
  }
  const std::size_t ns = g.spatial_size();
  for (std::size_t o = 0; o < g.n_orient; ++o) {
    const std::size_t a = static_cast<std::size_t>(g.sphere->antipode(o));
    if (a <= o) continue;
    auto p = u.slice(o);
    auto q = u.slice(a);
    for (std::size_t s = 0; s < ns; ++s) {
      const double m = 0.5 * (p[s] + q[s]);
      p[s] = m;
      q[s] = m;
    }
  }
}

FodfIngestResult ingest_fodf(std::istream& is, std::shared_ptr<const SphereSampling> sphere,
                             const FodfIngestOptions& opt) {
  if (!sphere) throw ConfigError("FODF ingestion needs a sphere sampling");
  std::string line;
  std::size_t offset = 0;
  std::size_t line_start = 0;
  auto next_line = [&]() -> bool {
    for (;;) {
      line_start = offset;
      if (!std::getline(is, line)) return false;
      offset += line.size() + 1;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      return true;
    }
  };

  if (!next_line()) throw FormatError("empty FODF table", 0);
  long nx = 0, ny = 0, nz = 0, na = 0;
  {
    std::istringstream hs(line);
    if (!(hs >> nx >> ny >> nz >> na) || nx <= 0 || ny <= 0 || nz <= 0 || na <= 0) {
      throw FormatError("bad FODF header, expected 'nx ny nz na'", line_start);
    }
  }
  if (static_cast<std::size_t>(na) != sphere->size()) {
    throw FormatError("table has " + std::to_string(na) + " values per voxel, sphere sampling has " +
                          std::to_string(sphere->size()),
                      line_start);
  }

  LiftedGrid grid = LiftedGrid::spatial(static_cast<std::size_t>(nx), static_cast<std::size_t>(ny),
                                        static_cast<std::size_t>(nz), sphere, opt.h);
  FodfIngestResult res{LiftedField(grid), 0};
  std::vector<char> seen(grid.spatial_size(), 0);
  std::vector<double> row(static_cast<std::size_t>(na));
  while (next_line()) {
    std::istringstream ls(line);
    long ix = 0, iy = 0, iz = 0;
    if (!(ls >> ix >> iy >> iz)) throw FormatError("bad voxel index", line_start);
    if (ix < 0 || iy < 0 || iz < 0 || ix >= nx || iy >= ny || iz >= nz) {
      throw FormatError("voxel (" + std::to_string(ix) + ", " + std::to_string(iy) + ", " + std::to_string(iz) +
                            ") outside the declared extents",
                        line_start);
    }
    for (auto& v : row) {
      if (!(ls >> v)) {
        throw FormatError("voxel row has fewer than " + std::to_string(na) + " values", line_start);
      }
    }
    std::string extra;
    if (ls >> extra) throw FormatError("voxel row has more than " + std::to_string(na) + " values", line_start);
    const std::size_t s = grid.index(static_cast<std::size_t>(ix), static_cast<std::size_t>(iy),
                                     static_cast<std::size_t>(iz), 0);
    if (seen[s]) throw FormatError("duplicate voxel row", line_start);
    seen[s] = 1;
    for (std::size_t o = 0; o < row.size(); ++o) {
      double v = row[o];
      if (!std::isfinite(v)) throw FormatError("non-finite value", line_start);
      if (v < 0.0) {
        v = 0.0;
        ++res.clamped;
      }
      res.field[grid.index(static_cast<std::size_t>(ix), static_cast<std::size_t>(iy),
                           static_cast<std::size_t>(iz), o)] = v;
    }
  }
  if (opt.symmetrize) symmetrize_antipodal(res.field);
  return res;
}

void write_fodf_table(std::ostream& os, const LiftedField& u) {
  const LiftedGrid& g = u.grid();
  if (g.dim != 3) throw ConfigError("FODF tables hold d=3 fields");
  const auto old = os.precision(17);
  os << g.nx << ' ' << g.ny << ' ' << g.nz << ' ' << g.n_orient << '\n';
  for (std::size_t z = 0; z < g.nz; ++z)
    for (std::size_t y = 0; y < g.ny; ++y)
      for (std::size_t x = 0; x < g.nx; ++x) {
        os << x << ' ' << y << ' ' << z;
        for (std::size_t o = 0; o < g.n_orient; ++o) os << ' ' << u.at(x, y, z, o);
        os << '\n';
      }
  os.precision(old);
}

}  // namespace rtflow
