#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "dyntex/harvest/session.hpp"
#include "dyntex/io/pgm.hpp"
#include "dyntex/volume.hpp"

namespace dyntex::harvest {

struct Window {
  double level = 50.0;
  double width = 400.0;
};

/// clamp((hu - (level - width/2)) / width, 0, 1) * 255, rounded half up.
std::uint8_t window_pixel(double hu, const Window& w);

struct MontageCell {
  std::size_t row = 0, col = 0;
  std::size_t candidate_id = 0;
  Phase phase = Phase::Unknown;
  std::size_t x = 0, y = 0, width = 0, height = 0;  // pixel rectangle in the raster
};

/// Unwindowed montage: one row per candidate, one column per phase, HU values.
struct MontageSource {
  std::size_t cell_w = 0, cell_h = 0, rows = 0;
  std::vector<std::size_t> candidate_ids;
  std::vector<float> hu;  // (rows * cell_h) x (4 * cell_w), row-major

  std::size_t width() const { return 4 * cell_w; }
  std::size_t height() const { return rows * cell_h; }
  std::vector<MontageCell> cells() const;
};

struct Montage {
  io::GrayImage image;
  std::vector<MontageCell> cells;
};

/// Each cell is the candidate's key-slice crop (footprint plus `margin` per side)
/// resampled to cell_w x cell_h. Throws on an empty candidate list.
MontageSource montage_source(const std::array<Volume, 4>& phases, const std::vector<SessionCandidate>& candidates,
                             std::size_t cell_w, std::size_t cell_h, double margin);

Montage window_montage(const MontageSource& src, const Window& w);

Montage render_montage(const std::array<Volume, 4>& phases, const std::vector<SessionCandidate>& candidates,
                       const Window& w, std::size_t cell = 64, double margin = 0.25);

}  // namespace dyntex::harvest
