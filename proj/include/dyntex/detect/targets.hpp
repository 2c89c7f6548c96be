#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "dyntex/detect/box.hpp"
#include "dyntex/numerics/grid.hpp"

namespace dyntex::detect {

/// Kernel width and per-axis resolution coefficients of the anisotropic target.
struct GaussianSpec {
  double sigma = 1.0;
  Vec3 gamma{1.0, 1.0, 1.0};
};

/// gamma = spacing / spacing_x, so the x coefficient is 1.
Vec3 gamma_from_spacing(const Vec3& spacing_mm);
/// sigma = max(min_sigma, min(s) / (divisor * R)).
struct SigmaRule {
  double divisor = 6.0;
  double min_sigma = 1.0;
};

/// Per-object kernel width at heatmap scale: max(1, min(s) / (6R)) by default.
double sigma_for_size(const Vec3& size, int R, const SigmaRule& rule = {});

struct HeatTarget {
  Grid3<double> heatmap;               // Y in [0,1], 1 at centre cells
  std::array<Grid3<double>, 3> offsets;  // p/R - floor(p/R) at centre cells
  std::array<Grid3<double>, 3> sizes;    // s at centre cells
  Grid3<std::uint8_t> center_mask;
  std::vector<std::array<std::size_t, 3>> centers;  // one per rendered box
  int R = 1;

  std::size_t num_centers() const;
};

/// One spec per box.
HeatTarget render_targets(const std::vector<CenterSize>& boxes, const Dims3& out_dims, int R,
                          const std::vector<GaussianSpec>& specs);
/// Same spec for every box.
HeatTarget render_targets(const std::vector<CenterSize>& boxes, const Dims3& out_dims, int R, const GaussianSpec& spec);

}  // namespace dyntex::detect
