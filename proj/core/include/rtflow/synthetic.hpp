#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>

#include <Eigen/Core>

#include "rtflow/image.hpp"
#include "rtflow/lifted_field.hpp"
#include "rtflow/sphere_grid.hpp"

namespace rtflow {

/// Archimedean spiral crossed by a straight diagonal line, Gaussian line
/// profile of the given width (pixels), values in [0, 1].
Image crossing_curves_image(std::size_t n, double width = 1.5);

/// Zero-mean image with unit RMS whose spectrum is supported on
/// ρ ≤ rho_max (fraction of Nyquist).
Image band_limited_image(std::size_t nx, std::size_t ny, double rho_max, std::uint64_t seed);

/// x += σ·N(0, 1), mt19937_64 seeded with `seed`.
void add_gaussian_noise(std::span<double> data, double sigma, std::uint64_t seed);

/// Samples drawn uniformly from [lo, hi), mt19937_64 seeded with `seed`.
LiftedField random_field(const LiftedGrid& grid, std::uint64_t seed, double lo = -1.0, double hi = 1.0);

/// Mirror padding (edge sample repeated) by `pad` pixels on every side, and its inverse.
Image pad_reflect(const Image& f, std::size_t pad);
Image crop(const Image& f, std::size_t pad);

/// d=2 lifted field with two straight bars through the grid center: one along
/// x, one at `angle_deg`. Inside a bar of half-width `radius` the angular
/// profile is exp(κ(cos²(θ - θ_bar) - 1)); zero elsewhere.
LiftedField crossing_bars_field(std::size_t n, std::size_t n_theta, double angle_deg, double radius, double kappa);

struct BundlePhantom {
  LiftedField field;
  Eigen::Vector3d dir1;
  Eigen::Vector3d dir2;
};

/// n³ grid with two straight fiber bundles through the center, one along x
/// and one in the xy-plane at `angle_deg` from it. Voxels within `radius`
/// of a bundle axis carry the lobe exp(κ((n·d)² - 1)); crossing voxels
/// carry the sum of both lobes.
BundlePhantom two_bundle_phantom(std::size_t n, std::shared_ptr<const SphereSampling> sphere, double angle_deg,
                                 double radius, double kappa);

}  // namespace rtflow
