#include "dyntex/numerics/activation.hpp"

namespace dyntex {

Tensor64 relu_forward(const Tensor64& x) {
  Tensor64 y = x;
  for (auto& v : y.storage()) v = v > 0.0 ? v : 0.0;
  return y;
}

Tensor64 relu_backward(const Tensor64& x, const Tensor64& upstream) {
  require_same_shape(x.shape(), upstream.shape(), "relu_backward");
  Tensor64 g(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = x[i] > 0.0 ? upstream[i] : 0.0;
  return g;
}

}  // namespace dyntex
