#include "dyntex/detect/targets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "../kernels/dispatch.hpp"

namespace dyntex::detect {

Vec3 gamma_from_spacing(const Vec3& spacing_mm) {
  return {1.0, spacing_mm[1] / spacing_mm[0], spacing_mm[2] / spacing_mm[0]};
}

double sigma_for_size(const Vec3& size, int R, const SigmaRule& rule) {
  const double smallest = std::min({size[0], size[1], size[2]});
  return std::max(rule.min_sigma, smallest / (rule.divisor * R));
}

std::size_t HeatTarget::num_centers() const {
  return static_cast<std::size_t>(std::count(center_mask.data.begin(), center_mask.data.end(), std::uint8_t{1}));
}

HeatTarget render_targets(const std::vector<CenterSize>& boxes, const Dims3& out_dims, int R,
                          const std::vector<GaussianSpec>& specs) {
  if (R < 1) throw std::invalid_argument("render_targets: R must be >= 1");
  if (specs.size() != boxes.size()) throw std::invalid_argument("render_targets: one GaussianSpec per box required");
  HeatTarget t;
  t.R = R;
  t.heatmap = Grid3<double>(out_dims, 0.0);
  for (int a = 0; a < 3; ++a) {
    t.offsets[a] = Grid3<double>(out_dims, 0.0);
    t.sizes[a] = Grid3<double>(out_dims, 0.0);
  }
  t.center_mask = Grid3<std::uint8_t>(out_dims, 0);
  for (std::size_t b = 0; b < boxes.size(); ++b) {
    const auto& cs = boxes[b];
    const auto& spec = specs[b];
    if (!(spec.sigma > 0) || !(spec.gamma[0] > 0 && spec.gamma[1] > 0 && spec.gamma[2] > 0)) {
      throw std::invalid_argument("render_targets: box " + std::to_string(b) + " has a non-positive sigma/gamma");
    }
    std::array<long, 3> cell{};
    for (int a = 0; a < 3; ++a) cell[a] = static_cast<long>(std::floor(cs.p[a] / R));
    if (!t.heatmap.contains(cell[0], cell[1], cell[2])) {
      throw std::invalid_argument("render_targets: centre of box " + std::to_string(b) + " falls outside the " +
                                  dims_string(out_dims) + " grid");
    }
    kernels::GaussianBlob blob{{double(cell[0]), double(cell[1]), double(cell[2])}, spec.gamma, spec.sigma};
    kernels::active::render_gaussian_max(t.heatmap, blob);
    const auto x = static_cast<std::size_t>(cell[0]), y = static_cast<std::size_t>(cell[1]),
               z = static_cast<std::size_t>(cell[2]);
    for (int a = 0; a < 3; ++a) {
      t.offsets[a](x, y, z) = cs.p[a] / R - static_cast<double>(cell[a]);
      t.sizes[a](x, y, z) = cs.s[a];
    }
    t.center_mask(x, y, z) = 1;
    t.centers.push_back({x, y, z});
  }
  return t;
}

HeatTarget render_targets(const std::vector<CenterSize>& boxes, const Dims3& out_dims, int R, const GaussianSpec& spec) {
  return render_targets(boxes, out_dims, R, std::vector<GaussianSpec>(boxes.size(), spec));
}

}  // namespace dyntex::detect
