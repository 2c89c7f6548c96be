#pragma once

#include <array>
#include <vector>

#include "dyntex/detect/box.hpp"
#include "dyntex/volume.hpp"

namespace dyntex::detect {

struct FeatureConfig {
  Dims3 grid{48, 48, 20};                 // detection grid (heatmap scale R = 1)
  std::vector<double> scales_mm{2.5, 5.0, 8.0};
  double intensity_scale_hu = 40.0;       // normalisation after median subtraction
};

/// Per-volume feature bank on the detection grid. `heat` holds one grid per
/// heat-head feature; `smooth` keeps the smoothed deviation maps from which
/// offset and size features are read at individual cells.
struct FeatureBank {
  Dims3 dims{};
  Dims3 source_dims{};
  Vec3 spacing_mm{};
  std::vector<Grid3<float>> heat;
  std::vector<Grid3<float>> smooth;  // one per scale, signed deviation from the median
};

FeatureBank compute_features(const Volume& vol, const FeatureConfig& cfg);

std::size_t num_heat_features(const FeatureConfig& cfg);
inline constexpr std::size_t kNumOffsetFeatures = 2;
inline constexpr std::size_t kNumSizeFeatures = 3;

/// Midpoint of the half-maximum run along `axis` relative to the cell centre, on the two finest maps.
std::array<double, kNumOffsetFeatures> offset_features(const FeatureBank& bank, const std::array<std::size_t, 3>& cell,
                                                       int axis);
/// Half-maximum extents along `axis` (in cells) on the two finest maps, and a constant 1.
std::array<double, kNumSizeFeatures> size_features(const FeatureBank& bank, const std::array<std::size_t, 3>& cell,
                                                   int axis);

/// Continuous-coordinate maps between a source grid and the corner-aligned detection grid.
Vec3 to_detection_grid(const Vec3& p, const Dims3& source, const Dims3& grid);
Vec3 from_detection_grid(const Vec3& p, const Dims3& source, const Dims3& grid);
CenterSize to_detection_grid(const CenterSize& cs, const Dims3& source, const Dims3& grid);
CenterSize from_detection_grid(const CenterSize& cs, const Dims3& source, const Dims3& grid);

}  // namespace dyntex::detect
