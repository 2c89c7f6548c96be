#include "dyntex/harvest/montage.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dyntex/classify/roi.hpp"
#include "dyntex/pts/pts.hpp"

namespace dyntex::harvest {

std::uint8_t window_pixel(double hu, const Window& w) {
  if (!(w.width > 0)) throw std::invalid_argument("window width must be > 0");
  const double t = std::clamp((hu - (w.level - w.width / 2.0)) / w.width, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::floor(t * 255.0 + 0.5));
}

std::vector<MontageCell> MontageSource::cells() const {
  std::vector<MontageCell> out;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < 4; ++c)
      out.push_back({r, c, candidate_ids[r], kContrastPhases[c], c * cell_w, r * cell_h, cell_w, cell_h});
  return out;
}

MontageSource montage_source(const std::array<Volume, 4>& phases, const std::vector<SessionCandidate>& candidates,
                             std::size_t cell_w, std::size_t cell_h, double margin) {
  if (candidates.empty()) throw std::invalid_argument("montage: no candidates");
  if (cell_w < 2 || cell_h < 2) throw std::invalid_argument("montage: cells must be at least 2x2");
  MontageSource src;
  src.cell_w = cell_w;
  src.cell_h = cell_h;
  src.rows = candidates.size();
  src.hu.assign(src.width() * src.height(), 0.0f);
  const Volume& ref = phases[0];
  for (std::size_t r = 0; r < candidates.size(); ++r) {
    const auto& c = candidates[r];
    src.candidate_ids.push_back(c.candidate_id);
    const std::size_t z = std::min(c.key_z, ref.shape()[2] - 1);
    const pts::SliceCrop crop = pts::crop_slice(phases, ref, c.det.box, z, margin);
    for (std::size_t p = 0; p < 4; ++p) {
      const Tensor64 cell = classify::resize_plane(crop.phases[p], cell_h, cell_w);
      for (std::size_t y = 0; y < cell_h; ++y)
        for (std::size_t x = 0; x < cell_w; ++x)
          src.hu[(r * cell_h + y) * src.width() + p * cell_w + x] = static_cast<float>(cell(y, x));
    }
  }
  return src;
}

Montage window_montage(const MontageSource& src, const Window& w) {
  if (!(w.width > 0)) throw std::invalid_argument("window width must be > 0");
  Montage m;
  m.image.width = src.width();
  m.image.height = src.height();
  m.image.pixels.resize(src.hu.size());
  for (std::size_t i = 0; i < src.hu.size(); ++i) m.image.pixels[i] = window_pixel(src.hu[i], w);
  m.cells = src.cells();
  return m;
}

Montage render_montage(const std::array<Volume, 4>& phases, const std::vector<SessionCandidate>& candidates,
                       const Window& w, std::size_t cell, double margin) {
  return window_montage(montage_source(phases, candidates, cell, cell, margin), w);
}

}  // namespace dyntex::harvest
