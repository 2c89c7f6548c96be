#pragma once

#include <vector>

#include "dyntex/numerics/grid.hpp"

namespace dyntex {

/// Normalised sampled Gaussian truncated at 3 sigma; sigma <= 0 yields the identity tap.
std::vector<double> gaussian_taps(double sigma);

/// Separable anisotropic Gaussian smoothing with clamp-to-edge borders.
/// `sigma` is per axis in cells.
Grid3<float> gaussian_smooth(const Grid3<float>& in, const Vec3& sigma);

}  // namespace dyntex
