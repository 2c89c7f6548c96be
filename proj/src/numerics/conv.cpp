#include "dyntex/numerics/conv.hpp"

#include "../kernels/dispatch.hpp"

namespace dyntex {
namespace {

kernels::ConvGeometry checked_geometry(const Tensor64& input, const Tensor64& kernels, std::size_t stride) {
  if (input.rank() != 3 || kernels.rank() != 4) {
    throw std::invalid_argument("conv2d: expected input [C,H,W] and kernels [F,C,k,k], got " +
                                shape_string(input.shape()) + " and " + shape_string(kernels.shape()));
  }
  if (kernels.extent(1) != input.extent(0) || kernels.extent(2) != kernels.extent(3)) {
    throw std::invalid_argument("conv2d: shape mismatch input " + shape_string(input.shape()) + " vs kernels " +
                                shape_string(kernels.shape()));
  }
  return kernels::conv_geometry(input.extent(0), input.extent(1), input.extent(2), kernels.extent(0),
                                kernels.extent(2), stride);
}

}  // namespace

Tensor64 conv2d_forward(const Tensor64& input, const Tensor64& kernels, const Tensor64& bias, std::size_t stride) {
  const auto g = checked_geometry(input, kernels, stride);
  if (bias.rank() != 1 || bias.extent(0) != g.filters) {
    throw std::invalid_argument("conv2d: shape mismatch bias " + shape_string(bias.shape()) + " vs kernels " +
                                shape_string(kernels.shape()));
  }
  Tensor64 out({g.filters, g.out_height, g.out_width});
  kernels::active::conv2d_forward(g, input.values(), kernels.values(), bias.values(), out.values());
  return out;
}

Conv2dGrads conv2d_backward(const Tensor64& input, const Tensor64& kernels, const Tensor64& upstream,
                            std::size_t stride) {
  const auto g = checked_geometry(input, kernels, stride);
  require_same_shape(upstream.shape(), Shape{g.filters, g.out_height, g.out_width}, "conv2d_backward upstream");
  Conv2dGrads grads{Tensor64(input.shape()), Tensor64(kernels.shape()), Tensor64({g.filters})};
  kernels::active::conv2d_backward_input(g, kernels.values(), upstream.values(), grads.input.values());
  kernels::active::conv2d_backward_weights(g, input.values(), upstream.values(), grads.kernels.values(),
                                           grads.bias.values());
  return grads;
}

}  // namespace dyntex
