#include "dyntex/detect/decode.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace dyntex::detect {

std::vector<DetectionCandidate> decode_peaks(const Grid3<double>& heatmap, const VectorField& offsets,
                                             const VectorField& sizes, int R, std::size_t topk, Phase phase) {
  if (topk == 0) throw std::invalid_argument("decode_peaks: topk must be >= 1");
  for (int a = 0; a < 3; ++a) {
    if (offsets[a].dims != heatmap.dims || sizes[a].dims != heatmap.dims) {
      throw std::invalid_argument("decode_peaks: offset/size grids must match the heatmap");
    }
  }
  struct Peak {
    double v;
    std::size_t x, y, z;
  };
  std::vector<Peak> peaks;
  const auto& d = heatmap.dims;
  for (std::size_t z = 0; z < d[2]; ++z) {
    for (std::size_t y = 0; y < d[1]; ++y) {
      for (std::size_t x = 0; x < d[0]; ++x) {
        const double v = heatmap(x, y, z);
        if (!(v > 0.0)) continue;
        bool is_peak = true;
        for (int dz = -1; dz <= 1 && is_peak; ++dz)
          for (int dy = -1; dy <= 1 && is_peak; ++dy)
            for (int dx = -1; dx <= 1 && is_peak; ++dx) {
              if (!dx && !dy && !dz) continue;
              const long nx = long(x) + dx, ny = long(y) + dy, nz = long(z) + dz;
              if (heatmap.contains(nx, ny, nz) && heatmap(nx, ny, nz) > v) is_peak = false;
            }
        if (is_peak) peaks.push_back({v, x, y, z});
      }
    }
  }
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
    if (a.v != b.v) return a.v > b.v;
    return std::tie(a.x, a.y, a.z) < std::tie(b.x, b.y, b.z);
  });
  if (peaks.size() > topk) peaks.resize(topk);

  std::vector<DetectionCandidate> out;
  out.reserve(peaks.size());
  for (const auto& pk : peaks) {
    const std::size_t i = heatmap.index(pk.x, pk.y, pk.z);
    const double cell[3] = {double(pk.x), double(pk.y), double(pk.z)};
    CenterSize cs;
    for (int a = 0; a < 3; ++a) {
      cs.p[a] = (cell[a] + offsets[a].data[i]) * R;
      cs.s[a] = std::max(1.0, sizes[a].data[i]);
    }
    out.push_back({pk.v, center_size_to_box(cs), phase});
  }
  return out;
}

}  // namespace dyntex::detect
