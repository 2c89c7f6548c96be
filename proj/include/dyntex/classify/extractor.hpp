#pragma once

#include <string_view>
#include <vector>

#include "dyntex/numerics/rng.hpp"
#include "dyntex/numerics/tensor.hpp"

namespace dyntex::classify {

enum class DescriptorMode { Conv, RawPatch };

std::string_view descriptor_mode_name(DescriptorMode m);
DescriptorMode parse_descriptor_mode(std::string_view s);

struct ConvLayer {
  Tensor64 kernels;  // [F, C, k, k]
  Tensor64 bias;     // [F]
  std::size_t stride = 2;
};

/// Maps an image [C,H,W] to a descriptor map [Dd,h,w]. Conv mode: 3x3
/// stride-2 convolutions, each followed by ReLU. RawPatch mode: flattened
/// non-overlapping patch x patch blocks, no parameters.
struct Extractor {
  DescriptorMode mode = DescriptorMode::Conv;
  std::vector<ConvLayer> layers;
  std::size_t in_channels = 5;
  std::size_t patch = 4;

  std::size_t descriptor_dim() const;
};

/// He-uniform initialisation; `widths` lists the filters per layer.
Extractor init_extractor(DescriptorMode mode, std::size_t in_channels, const std::vector<std::size_t>& widths, Rng& rng);

struct ExtractorTrace {
  std::vector<Tensor64> inputs;  // layer inputs
  std::vector<Tensor64> pre;     // pre-activation outputs
};

Tensor64 extractor_forward(const Extractor& ex, const Tensor64& image, ExtractorTrace* trace);

struct ExtractorGrads {
  std::vector<Tensor64> kernels;
  std::vector<Tensor64> bias;
};

/// Parameter gradients given dL/d(descriptor map); RawPatch yields none.
ExtractorGrads extractor_backward(const Extractor& ex, const ExtractorTrace& trace, const Tensor64& upstream);

/// Smallest image side that survives the extractor with at least one descriptor.
std::size_t min_input_side(const Extractor& ex);

}  // namespace dyntex::classify
