#pragma once

#include <string_view>

#include "dyntex/classify/model.hpp"
#include "dyntex/pts/pts.hpp"

namespace dyntex::classify {

/// Sadt: native-resolution crop, aggregation restricted to the mask.
/// DeepTen: the crop resized to a fixed square, aggregation everywhere.
enum class InputMode { Sadt, DeepTen };

std::string_view input_mode_name(InputMode m);
InputMode parse_input_mode(std::string_view s);

enum class MaskSource { Box, Segmentation };

struct RoiConfig {
  double hu_center = 80.0;
  double hu_scale = 60.0;
  std::size_t deepten_size = 32;
  MaskSource mask_source = MaskSource::Box;
};

inline constexpr std::size_t kInputChannels = 5;  // NC, A, V, D, mask

/// Normalised phases plus the mask channel; the aggregation mask follows the mode.
ClassifierInput make_input(const pts::SliceCrop& crop, InputMode mode, const RoiConfig& cfg);

/// Bilinear resize of a [H,W] plane with corner-aligned sampling.
Tensor64 resize_plane(const Tensor64& plane, std::size_t out_h, std::size_t out_w);

}  // namespace dyntex::classify
