#pragma once

#include "dyntex/numerics/tensor.hpp"

namespace dyntex {

Tensor64 relu_forward(const Tensor64& x);
/// Passes upstream where x > 0; the subgradient at exactly 0 is 0.
Tensor64 relu_backward(const Tensor64& x, const Tensor64& upstream);

}  // namespace dyntex
