#pragma once

#include "dyntex/volume.hpp"

namespace dyntex {

/// Corner-aligned trilinear resampling to `target` = [W,H,D]. Spacing is
/// rescaled so the physical extent between corner voxels is preserved.
Volume trilinear_resample(const Volume& vol, const Dims3& target);

/// Maps a continuous coordinate between two corner-aligned grids.
inline double map_corner_aligned(double coord, std::size_t from_extent, std::size_t to_extent) {
  return coord * static_cast<double>(to_extent - 1) / static_cast<double>(from_extent - 1);
}

}  // namespace dyntex
