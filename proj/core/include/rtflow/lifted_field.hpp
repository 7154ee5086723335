#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace rtflow {

class SphereSampling;

enum class Boundary {
  neumann,   // replicate padding of the outermost spatial layer
  periodic,  // wrap-around; used for translation tests and analytic checks
};

/// Sampling of the position-orientation space: a regular spatial grid with
/// step h times a set of orientations (uniform circle for d=2, a sphere
/// sampling for d=3).
///
/// Sample index layout: orientation slowest, then z, y, x fastest.
struct LiftedGrid {
  int dim = 2;
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::size_t nz = 1;
  std::size_t n_orient = 0;
  double h = 1.0;
  double h_a = 0.0;
  std::shared_ptr<const SphereSampling> sphere;
  Boundary boundary = Boundary::neumann;

  static LiftedGrid planar(std::size_t nx, std::size_t ny, std::size_t n_theta, double h = 1.0,
                           Boundary boundary = Boundary::neumann);
  static LiftedGrid spatial(std::size_t nx, std::size_t ny, std::size_t nz,
                            std::shared_ptr<const SphereSampling> sphere, double h = 1.0,
                            Boundary boundary = Boundary::neumann);

  std::size_t spatial_size() const { return nx * ny * nz; }
  std::size_t size() const { return spatial_size() * n_orient; }
  std::size_t index(std::size_t x, std::size_t y, std::size_t z, std::size_t o) const {
    return ((o * nz + z) * ny + y) * nx + x;
  }

  /// Unit orientation of slice o. For d=2 the third component is zero.
  Eigen::Vector3d orientation(std::size_t o) const;

  /// Throws ConfigError when extents, steps or the sphere sampling are inconsistent.
  void validate() const;

  /// Same shape and orientation sampling (boundary mode ignored).
  bool same_shape(const LiftedGrid& other) const;
};

/// Orientation table for d=2: n_k = (cos 2πk/N, sin 2πk/N). When N is a
/// multiple of 4 the table is exactly invariant under quarter turns.
std::vector<Eigen::Vector2d> planar_directions(std::size_t n_theta);

/// Scalar function on a LiftedGrid.
class LiftedField {
 public:
  LiftedField() = default;
  explicit LiftedField(LiftedGrid grid, double fill = 0.0);
  LiftedField(LiftedGrid grid, std::vector<double> values);

  const LiftedGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& storage() { return values_; }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& at(std::size_t x, std::size_t y, std::size_t z, std::size_t o) {
    return values_[grid_.index(x, y, z, o)];
  }
  double at(std::size_t x, std::size_t y, std::size_t z, std::size_t o) const {
    return values_[grid_.index(x, y, z, o)];
  }

  std::span<double> slice(std::size_t o);
  std::span<const double> slice(std::size_t o) const;

  bool all_finite() const;

 private:
  LiftedGrid grid_;
  std::vector<double> values_;
};

/// Largest absolute value.
double sup_norm(const LiftedField& u);

/// Counter-clockwise quarter turn of a d=2 field: spatial rotation about the
/// grid center combined with the orientation shift o -> o + N/4. Requires
/// nx == ny and N % 4 == 0.
LiftedField rotate_quarter_turn(const LiftedField& u);

}  // namespace rtflow
