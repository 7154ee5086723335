#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "rtflow/lifted_field.hpp"

namespace rtflow {

enum class Interpolation {
  linear,         // bilinear (d=2) / trilinear (d=3)
  cubic_bspline,  // cubic B-spline on prefiltered coefficients
};

struct Extents {
  std::size_t nx = 1;
  std::size_t ny = 1;
  std::size_t nz = 1;
  std::size_t size() const { return nx * ny * nz; }
};

/// Central difference (u(x + s) - u(x - s)) / 2h along a fixed displacement s
/// (in grid units), evaluated by interpolation of the spatial slice.
///
/// For cubic B-splines the stencil acts on spline coefficients; callers run
/// bspline_prefilter() on the samples first. Out-of-range taps are clamped
/// (Neumann) or wrapped (periodic).
class CentralDifference {
 public:
  struct Tap {
    int dx;
    int dy;
    int dz;
    double w;
  };

  /// Only the first `dim` axes are interpolated; displacement components
  /// beyond them must be zero.
  CentralDifference(const Eigen::Vector3d& displacement, double h, Interpolation interp, int dim);

  /// out = D c
  void gather(const Extents& ext, Boundary bc, std::span<const double> c, std::span<double> out) const;
  /// out += Dᵀ v
  void scatter(const Extents& ext, Boundary bc, std::span<const double> v, std::span<double> out) const;

  std::span<const Tap> taps() const { return taps_; }

 private:
  std::vector<Tap> taps_;
  int reach_x_ = 0;
  int reach_y_ = 0;
  int reach_z_ = 0;
};

/// In-place application of the inverse cubic B-spline sampling matrix along
/// every axis of extent > 1. The 1D sampling matrix is symmetric, so this
/// operator is its own adjoint.
void bspline_prefilter(const Extents& ext, Boundary bc, std::span<double> data);

}  // namespace rtflow
