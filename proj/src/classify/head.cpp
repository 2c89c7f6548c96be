#include "dyntex/classify/head.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dyntex::classify {

HeadParams init_head(std::size_t num_classes, std::size_t input_dim, double scale, Rng& rng) {
  HeadParams p{Tensor64({num_classes, input_dim}), Tensor64({num_classes}, 0.0)};
  for (auto& v : p.weight.storage()) v = rng.uniform(-scale, scale);
  return p;
}

Tensor64 head_logits(const Tensor64& encoding, const HeadParams& params) {
  if (params.weight.rank() != 2 || params.bias.shape() != Shape{params.weight.extent(0)}) {
    throw std::invalid_argument("head: weight " + shape_string(params.weight.shape()) + " and bias " +
                                shape_string(params.bias.shape()) + " are inconsistent");
  }
  if (encoding.size() != params.input_dim()) {
    throw std::invalid_argument("head: encoding " + shape_string(encoding.shape()) + " vs weight " +
                                shape_string(params.weight.shape()));
  }
  const std::size_t C = params.num_classes(), L = params.input_dim();
  Tensor64 z({C});
  for (std::size_t c = 0; c < C; ++c) {
    double s = params.bias[c];
    for (std::size_t j = 0; j < L; ++j) s += params.weight[c * L + j] * encoding[j];
    z[c] = s;
  }
  return z;
}

Tensor64 softmax(const Tensor64& logits) {
  const double mx = *std::max_element(logits.storage().begin(), logits.storage().end());
  Tensor64 p(logits.shape());
  double total = 0.0;
  for (std::size_t c = 0; c < logits.size(); ++c) total += (p[c] = std::exp(logits[c] - mx));
  for (auto& v : p.storage()) v /= total;
  return p;
}

Tensor64 head_forward(const Tensor64& encoding, const HeadParams& params) {
  return softmax(head_logits(encoding, params));
}

HeadGrads head_backward(const Tensor64& encoding, const HeadParams& params, const Tensor64& dlogits) {
  const std::size_t C = params.num_classes(), L = params.input_dim();
  if (dlogits.size() != C || encoding.size() != L) throw std::invalid_argument("head_backward: shape mismatch");
  HeadGrads g{Tensor64({L}, 0.0), Tensor64({C, L}), Tensor64({C})};
  for (std::size_t c = 0; c < C; ++c) {
    g.bias[c] = dlogits[c];
    for (std::size_t j = 0; j < L; ++j) {
      g.weight[c * L + j] = dlogits[c] * encoding[j];
      g.input[j] += dlogits[c] * params.weight[c * L + j];
    }
  }
  return g;
}

}  // namespace dyntex::classify
