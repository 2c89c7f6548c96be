#include "dyntex/classify/focal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dyntex::classify {
namespace {

void check(const Tensor64& probs, std::size_t label, const std::vector<double>& weights) {
  if (label >= probs.size() || label >= weights.size()) {
    throw std::invalid_argument("weighted_focal_loss: unknown label " + std::to_string(label) + " for " +
                                std::to_string(probs.size()) + " classes");
  }
}

}  // namespace

std::vector<double> default_class_weights() { return {5.0, 1.0, 1.0, 2.0}; }

double weighted_focal_loss(const Tensor64& probs, std::size_t label, const std::vector<double>& weights, double gamma) {
  check(probs, label, weights);
  const double p = std::clamp(probs[label], kProbClip, 1.0 - kProbClip);
  return -weights[label] * std::pow(1.0 - p, gamma) * std::log(p);
}

double weighted_focal_loss_dp(const Tensor64& probs, std::size_t label, const std::vector<double>& weights,
                              double gamma) {
  check(probs, label, weights);
  const double p = probs[label];
  if (p <= kProbClip || p >= 1.0 - kProbClip) return 0.0;
  const double w = weights[label];
  const double q = 1.0 - p;
  const double dq = gamma == 0.0 ? 0.0 : gamma * std::pow(q, gamma - 1.0) * std::log(p);
  return w * (dq - std::pow(q, gamma) / p);
}

Tensor64 weighted_focal_loss_grad_logits(const Tensor64& probs, std::size_t label, const std::vector<double>& weights,
                                         double gamma) {
  const double dp = weighted_focal_loss_dp(probs, label, weights, gamma);
  Tensor64 g(probs.shape(), 0.0);
  const double py = probs[label];
  for (std::size_t j = 0; j < probs.size(); ++j) g[j] = dp * py * ((j == label ? 1.0 : 0.0) - probs[j]);
  return g;
}

}  // namespace dyntex::classify
