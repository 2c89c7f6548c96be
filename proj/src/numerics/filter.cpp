#include "dyntex/numerics/filter.hpp"

#include <cmath>

#include "../kernels/dispatch.hpp"

namespace dyntex {

std::vector<double> gaussian_taps(double sigma) {
  if (sigma <= 0.0) return {1.0};
  const int r = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> taps(2 * r + 1);
  double total = 0.0;
  for (int t = -r; t <= r; ++t) {
    taps[t + r] = std::exp(-0.5 * (t * t) / (sigma * sigma));
    total += taps[t + r];
  }
  for (auto& v : taps) v /= total;
  return taps;
}

Grid3<float> gaussian_smooth(const Grid3<float>& in, const Vec3& sigma) {
  Grid3<float> a = in;
  Grid3<float> b(in.dims);
  for (int axis = 0; axis < 3; ++axis) {
    if (sigma[axis] <= 0.0 || in.dims[axis] < 2) continue;
    const auto taps = gaussian_taps(sigma[axis]);
    kernels::active::filter_axis(a.data, in.dims, axis, taps, b.data);
    std::swap(a, b);
  }
  return a;
}

}  // namespace dyntex
