#include <algorithm>
#include <stdexcept>

#include "dyntex/texture/encoding.hpp"

namespace dyntex::texture {

AggregationMask downsample_mask(const Tensor64& pixel_mask, const std::array<std::size_t, 2>& grid) {
  if (pixel_mask.rank() != 2) throw std::invalid_argument("downsample_mask: expected [H,W], got " + shape_string(pixel_mask.shape()));
  if (grid[0] == 0 || grid[1] == 0) throw std::invalid_argument("downsample_mask: empty grid");
  const std::size_t H = pixel_mask.extent(0), W = pixel_mask.extent(1);
  const std::size_t h = grid[0], w = grid[1];
  auto window = [](std::size_t cell, std::size_t cells, std::size_t pixels) {
    std::size_t lo = cell * pixels / cells;
    std::size_t hi = std::max(lo + 1, (cell + 1) * pixels / cells);
    return std::pair{std::min(lo, pixels - 1), std::min(hi, pixels)};
  };
  AggregationMask mask{Tensor64({h * w}, 0.0)};
  for (std::size_t u = 0; u < h; ++u) {
    const auto [y0, y1] = window(u, h, H);
    for (std::size_t v = 0; v < w; ++v) {
      const auto [x0, x1] = window(v, w, W);
      std::size_t on = 0;
      for (std::size_t y = y0; y < y1; ++y)
        for (std::size_t x = x0; x < x1; ++x) on += pixel_mask(y, x) > 0.5 ? 1 : 0;
      const std::size_t total = (y1 - y0) * (x1 - x0);
      mask.delta[u * w + v] = 2 * on >= total ? 1.0 : 0.0;
    }
  }
  return mask;
}

}  // namespace dyntex::texture
