#pragma once

#include <vector>

#include "dyntex/numerics/tensor.hpp"

namespace dyntex::classify {

inline constexpr double kProbClip = 1e-6;

/// HCC 5, ICC 1, Benign 1, Metastasis 2.
std::vector<double> default_class_weights();

/// -w[label] (1 - p_label)^gamma log p_label with p_label clipped to [1e-6, 1 - 1e-6].
double weighted_focal_loss(const Tensor64& probs, std::size_t label, const std::vector<double>& weights, double gamma);

/// dL/dp_label (zero when p_label is clipped).
double weighted_focal_loss_dp(const Tensor64& probs, std::size_t label, const std::vector<double>& weights,
                              double gamma);

/// Gradient with respect to the logits that produced `probs` through softmax.
Tensor64 weighted_focal_loss_grad_logits(const Tensor64& probs, std::size_t label, const std::vector<double>& weights,
                                         double gamma);

}  // namespace dyntex::classify
