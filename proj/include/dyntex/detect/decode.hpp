#pragma once

#include <vector>

#include "dyntex/detect/losses.hpp"

namespace dyntex::detect {

/// Local maxima of the heatmap over the 3x3x3 neighbourhood with positive
/// score, top-k by value (ties by (x,y,z) cell order). Centre = (cell +
/// offset) * R; box from centre and predicted size (sizes clamped to >= 1).
std::vector<DetectionCandidate> decode_peaks(const Grid3<double>& heatmap, const VectorField& offsets,
                                             const VectorField& sizes, int R, std::size_t topk,
                                             Phase phase = Phase::Unknown);

}  // namespace dyntex::detect
