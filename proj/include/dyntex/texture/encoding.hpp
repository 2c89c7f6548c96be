#pragma once

// Spatially adaptive deep texture encoding: soft-assigned residuals to a
// learnable codebook, aggregated only over locations where the mask is set,
// then l2-normalised.

#include <array>
#include <cstddef>

#include "dyntex/numerics/rng.hpp"
#include "dyntex/numerics/tensor.hpp"

namespace dyntex::texture {

struct Codebook {
  Tensor64 codewords;  // [K, Dd]
  Tensor64 smoothing;  // [K]

  std::size_t size() const { return codewords.extent(0); }
  std::size_t dim() const { return codewords.extent(1); }
};

/// Codewords uniform in [-sigma_hat, sigma_hat], smoothing factors 1.
Codebook init_codebook(std::size_t K, std::size_t dim, double sigma_hat, Rng& rng);

struct DescriptorField {
  Tensor64 descriptors;  // [M, Dd]
  std::array<std::size_t, 2> grid{0, 0};  // (h, w), h*w == M

  std::size_t count() const { return descriptors.extent(0); }
};

/// Reorders a feature map [Dd, h, w] into a field of M = h*w descriptors.
DescriptorField field_from_feature_map(const Tensor64& fmap);
/// Inverse of field_from_feature_map for gradients.
Tensor64 feature_map_from_field(const Tensor64& descriptors, const std::array<std::size_t, 2>& grid);

struct AggregationMask {
  Tensor64 delta;  // [M], values in {0, 1}

  static AggregationMask ones(std::size_t M) { return {Tensor64({M}, 1.0)}; }
};

struct EncodingIntermediates {
  Tensor64 residuals;    // [M, K, Dd]
  Tensor64 assignments;  // [M, K]
};

struct Encoding {
  Tensor64 per_codeword;          // [K, Dd]
  Tensor64 flattened_normalized;  // [K*Dd]
  double norm = 0.0;              // l2 norm before normalisation
  EncodingIntermediates intermediates;
};

struct EncodingGradients {
  Tensor64 descriptors;  // [M, Dd]
  Tensor64 codewords;    // [K, Dd]
  Tensor64 smoothing;    // [K]
};

inline constexpr double kNormEpsilon = 1e-12;

EncodingIntermediates soft_assign(const DescriptorField& field, const Codebook& book);

Encoding encode_forward(const DescriptorField& field, const Codebook& book, const AggregationMask& mask);

/// Gradients of a scalar loss with upstream dL/d(flattened_normalized).
/// `enc` must come from encode_forward on the same inputs.
EncodingGradients encode_backward(const DescriptorField& field, const Codebook& book, const AggregationMask& mask,
                                  const Encoding& enc, const Tensor64& upstream);

/// Majority pooling of a binary pixel mask [H,W] onto an (h, w) descriptor grid:
/// a cell is 1 iff at least half of its window is 1.
AggregationMask downsample_mask(const Tensor64& pixel_mask, const std::array<std::size_t, 2>& grid);

}  // namespace dyntex::texture
