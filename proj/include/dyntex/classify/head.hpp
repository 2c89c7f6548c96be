#pragma once

#include "dyntex/numerics/rng.hpp"
#include "dyntex/numerics/tensor.hpp"

namespace dyntex::classify {

struct HeadParams {
  Tensor64 weight;  // [C, L]
  Tensor64 bias;    // [C]
  std::size_t num_classes() const { return weight.extent(0); }
  std::size_t input_dim() const { return weight.extent(1); }
};

HeadParams init_head(std::size_t num_classes, std::size_t input_dim, double scale, Rng& rng);

Tensor64 head_logits(const Tensor64& encoding, const HeadParams& params);
/// Max-subtracted softmax.
Tensor64 softmax(const Tensor64& logits);
Tensor64 head_forward(const Tensor64& encoding, const HeadParams& params);

struct HeadGrads {
  Tensor64 input;   // [L]
  Tensor64 weight;  // [C, L]
  Tensor64 bias;    // [C]
};
HeadGrads head_backward(const Tensor64& encoding, const HeadParams& params, const Tensor64& dlogits);

}  // namespace dyntex::classify
