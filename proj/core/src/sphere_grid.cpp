#include "rtflow/sphere_grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <ostream>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "rtflow/errors.hpp"

namespace rtflow {

namespace {

using Vec3 = Eigen::Vector3d;

double geodesic(const Vec3& a, const Vec3& b) { return std::atan2(a.cross(b).norm(), a.dot(b)); }

// Solid angle of the spherical triangle (a, b, c) on the unit sphere.
double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double num = std::abs(a.dot(b.cross(c)));
  const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
  return 2.0 * std::atan2(num, den);
}

}  // namespace

SphereSampling SphereSampling::icosphere(int subdiv) {
  if (subdiv < 0 || subdiv > max_subdivision) {
    throw ConfigError("icosphere subdivision must lie in [0, " + std::to_string(max_subdivision) +
                      "], got " + std::to_string(subdiv));
  }
  SphereSampling s;
  s.subdiv_ = subdiv;

  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const double base[12][3] = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
                              {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
                              {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
  for (const auto& p : base) s.vertices_.push_back(Vec3(p[0], p[1], p[2]).normalized());
  s.faces_ = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
              {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
              {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};

  for (int level = 0; level < subdiv; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const int idx = static_cast<int>(s.vertices_.size());
      s.vertices_.push_back((s.vertices_[a] + s.vertices_[b]).normalized());
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(s.faces_.size() * 4);
    for (const auto& f : s.faces_) {
      const int ab = mid(f[0], f[1]);
      const int bc = mid(f[1], f[2]);
      const int ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    s.faces_ = std::move(next);
  }

  s.build_topology();
  s.build_weights();
  s.build_stencils();
  s.build_antipodes();
  return s;
}

void SphereSampling::build_topology() {
  const std::size_t n = vertices_.size();
  std::vector<std::vector<int>> adj(n);
  for (const auto& f : faces_) {
    for (int k = 0; k < 3; ++k) {
      adj[f[k]].push_back(f[(k + 1) % 3]);
      adj[f[k]].push_back(f[(k + 2) % 3]);
    }
  }
  offsets_.assign(n + 1, 0);
  adjacency_.clear();
  for (std::size_t i = 0; i < n; ++i) {
    auto& a = adj[i];
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    adjacency_.insert(adjacency_.end(), a.begin(), a.end());
    offsets_[i + 1] = adjacency_.size();
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (int j : neighbors(i))
      if (static_cast<std::size_t>(j) > i) total += geodesic(vertices_[i], vertices_[j]);
  h_a_ = total / static_cast<double>(edge_count());
}

void SphereSampling::build_weights() {
  weights_.assign(vertices_.size(), 0.0);
  for (const auto& f : faces_) {
    const double area = triangle_area(vertices_[f[0]], vertices_[f[1]], vertices_[f[2]]);
    for (int k = 0; k < 3; ++k) weights_[f[k]] += area / 3.0;
  }
}

void SphereSampling::build_stencils() {
  const std::size_t n = vertices_.size();
  coeffs_.assign(adjacency_.size(), Vec3::Zero());
  center_.assign(n, Vec3::Zero());
  auto slot = [&](std::size_t i, int j) {
    const auto nb = neighbors(i);
    return offsets_[i] + static_cast<std::size_t>(std::lower_bound(nb.begin(), nb.end(), j) - nb.begin());
  };
  for (const auto& f : faces_) {
    const Vec3 p[3] = {vertices_[f[0]], vertices_[f[1]], vertices_[f[2]]};
    const Vec3 cross = (p[1] - p[0]).cross(p[2] - p[0]);
    const double twice_flat = cross.norm();
    if (twice_flat < 1e-14) throw ConfigError("degenerate icosphere face");
    const Vec3 normal = cross / twice_flat;
    // Gradients of the flat P1 hat functions on the chordal triangle.
    Vec3 hat[3];
    for (int k = 0; k < 3; ++k) hat[k] = normal.cross(p[(k + 2) % 3] - p[(k + 1) % 3]) / twice_flat;
    const double third = triangle_area(p[0], p[1], p[2]) / 3.0;
    for (int a = 0; a < 3; ++a) {
      const std::size_t i = static_cast<std::size_t>(f[a]);
      const double scale = third / weights_[i];
      for (int k = 0; k < 3; ++k) {
        if (k == a) continue;
        const Vec3 g = hat[k] - p[a].dot(hat[k]) * p[a];
        coeffs_[slot(i, f[k])] += scale * g;
        center_[i] += scale * g;
      }
    }
  }
  // Adjoint taps: for k, entries w_i a_ik / w_k over i ∈ N(k) (adjacency is symmetric).
  adjoint_.clear();
  adjoint_.reserve(adjacency_.size());
  for (std::size_t k = 0; k < n; ++k) {
    for (int i : neighbors(k)) {
      const auto nb = neighbors(static_cast<std::size_t>(i));
      const auto it = std::lower_bound(nb.begin(), nb.end(), static_cast<int>(k));
      const std::size_t r = static_cast<std::size_t>(it - nb.begin());
      const Vec3 a_ik = coeffs_[offsets_[static_cast<std::size_t>(i)] + r];
      adjoint_.push_back({i, a_ik * (weights_[static_cast<std::size_t>(i)] / weights_[k])});
    }
  }
}

void SphereSampling::build_antipodes() {
  antipode_.assign(vertices_.size(), -1);
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const std::size_t j = nearest_vertex(-vertices_[i]);
    if ((vertices_[j] + vertices_[i]).norm() < 1e-12) antipode_[i] = static_cast<int>(j);
  }
}

std::size_t SphereSampling::edge_count() const { return adjacency_.size() / 2; }

std::span<const int> SphereSampling::neighbors(std::size_t i) const {
  return std::span<const int>(adjacency_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
}

std::span<const Eigen::Vector3d> SphereSampling::gradient_coefficients(std::size_t i) const {
  return std::span<const Vec3>(coeffs_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
}

std::span<const SphereSampling::AdjointTap> SphereSampling::adjoint_taps(std::size_t k) const {
  return std::span<const AdjointTap>(adjoint_).subspan(offsets_[k], offsets_[k + 1] - offsets_[k]);
}

bool SphereSampling::antipodally_closed() const {
  return std::all_of(antipode_.begin(), antipode_.end(), [](int a) { return a >= 0; });
}

std::size_t SphereSampling::nearest_vertex(const Eigen::Vector3d& direction) const {
  std::size_t best = 0;
  double best_dot = -2.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const double d = vertices_[i].dot(direction);
    if (d > best_dot) {
      best_dot = d;
      best = i;
    }
  }
  return best;
}

std::shared_ptr<const SphereSampling> build_icosphere(int subdiv) {
  if (subdiv < 0 || subdiv > SphereSampling::max_subdivision) return std::make_shared<const SphereSampling>(SphereSampling::icosphere(subdiv));
  static std::mutex mutex;
  static std::array<std::shared_ptr<const SphereSampling>, SphereSampling::max_subdivision + 1> cache;
  const std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[static_cast<std::size_t>(subdiv)];
  if (!slot) slot = std::make_shared<const SphereSampling>(SphereSampling::icosphere(subdiv));
  return slot;
}

std::vector<Eigen::Vector3d> spherical_gradient(std::span<const double> f, const SphereSampling& s) {
  if (f.size() != s.size()) throw ConfigError("function size does not match sphere sampling");
  std::vector<Vec3> g(s.size(), Vec3::Zero());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto nb = s.neighbors(i);
    const auto co = s.gradient_coefficients(i);
    Vec3 acc = Vec3::Zero();
    for (std::size_t r = 0; r < nb.size(); ++r) acc += co[r] * (f[static_cast<std::size_t>(nb[r])] - f[i]);
    g[i] = acc;
  }
  return g;
}

std::vector<double> spherical_divergence(std::span<const Eigen::Vector3d> v, const SphereSampling& s) {
  if (v.size() != s.size()) throw ConfigError("vector field size does not match sphere sampling");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (std::abs(v[i].dot(s.vertex(i))) > 1e-10 * (1.0 + v[i].norm())) {
      throw ConfigError("vector at vertex " + std::to_string(i) + " is not tangent to the sphere");
    }
  }
  std::vector<double> out(s.size(), 0.0);
  for (std::size_t k = 0; k < s.size(); ++k) {
    double acc = s.gradient_center(k).dot(v[k]);
    for (const auto& tap : s.adjoint_taps(k)) acc -= tap.coeff.dot(v[static_cast<std::size_t>(tap.vertex)]);
    out[k] = acc;
  }
  return out;
}

void write_sampling_text(std::ostream& os, const SphereSampling& s) {
  const auto old_prec = os.precision(17);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& v = s.vertex(i);
    os << i << ' ' << v.x() << ' ' << v.y() << ' ' << v.z() << ' ' << s.weights()[i] << '\n';
  }
  os.precision(old_prec);
}

}  // namespace rtflow
