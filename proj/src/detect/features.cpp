#include "dyntex/detect/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dyntex/numerics/filter.hpp"
#include "dyntex/numerics/resample.hpp"

namespace dyntex::detect {
namespace {

double median_of(std::vector<float> v) {
  const auto mid = v.begin() + static_cast<long>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

double axis_ratio(std::size_t source, std::size_t grid) {
  return static_cast<double>(grid - 1) / static_cast<double>(source - 1);
}

// Distance from the cell along one direction until |map| falls below half
// its value at the cell (or flips sign), linearly interpolated.
double half_max_run(const Grid3<float>& g, const std::array<std::size_t, 3>& cell, int axis, int dir) {
  const double v0 = g(cell[0], cell[1], cell[2]);
  const double target = 0.5 * std::abs(v0);
  if (target <= 0.0) return 0.5;
  const long limit = long(g.dims[axis]);
  double prev = std::abs(v0);
  for (long t = 1;; ++t) {
    std::array<long, 3> c{long(cell[0]), long(cell[1]), long(cell[2])};
    c[axis] += dir * t;
    if (c[axis] < 0 || c[axis] >= limit) return double(t) - 0.5;
    const double v = g(std::size_t(c[0]), std::size_t(c[1]), std::size_t(c[2]));
    const double a = (v * v0 > 0) ? std::abs(v) : 0.0;
    if (a < target) return (t - 1) + (prev - target) / std::max(prev - a, 1e-12);
    prev = a;
  }
}

}  // namespace

std::size_t num_heat_features(const FeatureConfig& cfg) {
  // Per scale: smoothed deviation, its square, DoG against the next scale, |DoG|.
  return 4 * cfg.scales_mm.size();
}

FeatureBank compute_features(const Volume& vol, const FeatureConfig& cfg) {
  if (cfg.scales_mm.empty()) throw std::invalid_argument("feature config needs at least one scale");
  FeatureBank bank;
  bank.source_dims = vol.shape();
  const Volume grid = trilinear_resample(vol, cfg.grid);
  bank.dims = grid.shape();
  bank.spacing_mm = grid.spacing_mm;

  Grid3<float> norm = grid.voxels;
  const double med = median_of(norm.data);
  for (auto& v : norm.data) v = static_cast<float>((v - med) / cfg.intensity_scale_hu);

  auto smooth_mm = [&](double s_mm) {
    Vec3 sigma{};
    for (int a = 0; a < 3; ++a) sigma[a] = s_mm / bank.spacing_mm[a];
    return gaussian_smooth(norm, sigma);
  };
  for (double s : cfg.scales_mm) bank.smooth.push_back(smooth_mm(s));
  const Grid3<float> surround = smooth_mm(2.0 * cfg.scales_mm.back());

  for (std::size_t k = 0; k < cfg.scales_mm.size(); ++k) {
    const Grid3<float>& g = bank.smooth[k];
    const Grid3<float>& next = k + 1 < bank.smooth.size() ? bank.smooth[k + 1] : surround;
    Grid3<float> sq(bank.dims), dog(bank.dims), adog(bank.dims);
    for (std::size_t i = 0; i < g.size(); ++i) {
      sq.data[i] = g.data[i] * g.data[i];
      dog.data[i] = g.data[i] - next.data[i];
      adog.data[i] = std::abs(dog.data[i]);
    }
    bank.heat.push_back(g);
    bank.heat.push_back(std::move(sq));
    bank.heat.push_back(std::move(dog));
    bank.heat.push_back(std::move(adog));
  }
  return bank;
}

std::array<double, kNumOffsetFeatures> offset_features(const FeatureBank& bank, const std::array<std::size_t, 3>& cell,
                                                       int axis) {
  std::array<double, kNumOffsetFeatures> out{};
  for (std::size_t k = 0; k < kNumOffsetFeatures; ++k) {
    const auto& g = bank.smooth[std::min(k, bank.smooth.size() - 1)];
    out[k] = 0.5 * (half_max_run(g, cell, axis, +1) - half_max_run(g, cell, axis, -1));
  }
  return out;
}

std::array<double, kNumSizeFeatures> size_features(const FeatureBank& bank, const std::array<std::size_t, 3>& cell,
                                                   int axis) {
  const auto& fine = bank.smooth.front();
  const auto& mid = bank.smooth[std::min<std::size_t>(1, bank.smooth.size() - 1)];
  const double e0 = half_max_run(fine, cell, axis, -1) + half_max_run(fine, cell, axis, +1);
  const double e1 = half_max_run(mid, cell, axis, -1) + half_max_run(mid, cell, axis, +1);
  return {e0, e1, 1.0};
}

Vec3 to_detection_grid(const Vec3& p, const Dims3& source, const Dims3& grid) {
  Vec3 out{};
  for (int a = 0; a < 3; ++a) out[a] = (p[a] - 0.5) * axis_ratio(source[a], grid[a]) + 0.5;
  return out;
}

Vec3 from_detection_grid(const Vec3& p, const Dims3& source, const Dims3& grid) {
  Vec3 out{};
  for (int a = 0; a < 3; ++a) out[a] = (p[a] - 0.5) / axis_ratio(source[a], grid[a]) + 0.5;
  return out;
}

CenterSize to_detection_grid(const CenterSize& cs, const Dims3& source, const Dims3& grid) {
  CenterSize out{to_detection_grid(cs.p, source, grid), {}};
  for (int a = 0; a < 3; ++a) out.s[a] = cs.s[a] * axis_ratio(source[a], grid[a]);
  return out;
}

CenterSize from_detection_grid(const CenterSize& cs, const Dims3& source, const Dims3& grid) {
  CenterSize out{from_detection_grid(cs.p, source, grid), {}};
  for (int a = 0; a < 3; ++a) out.s[a] = cs.s[a] / axis_ratio(source[a], grid[a]);
  return out;
}

}  // namespace dyntex::detect
