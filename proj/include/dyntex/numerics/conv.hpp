#pragma once

#include "dyntex/numerics/tensor.hpp"

namespace dyntex {

/// Zero-padded 2D cross-correlation (no kernel flip).
/// input [C,H,W], kernels [F,C,k,k], bias [F] -> [F, ceil(H/stride), ceil(W/stride)].
Tensor64 conv2d_forward(const Tensor64& input, const Tensor64& kernels, const Tensor64& bias, std::size_t stride);

struct Conv2dGrads {
  Tensor64 input;
  Tensor64 kernels;
  Tensor64 bias;
};

Conv2dGrads conv2d_backward(const Tensor64& input, const Tensor64& kernels, const Tensor64& upstream,
                            std::size_t stride);

}  // namespace dyntex
