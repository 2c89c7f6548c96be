#pragma once

#include <vector>

#include "dyntex/numerics/tensor.hpp"

namespace dyntex::classify {

/// Modal class over models; ties go to the tied class with the highest mean
/// probability, then to the lower class index.
std::size_t majority_vote(const std::vector<std::size_t>& predictions, const std::vector<Tensor64>& probs);

/// Votes with each model's argmax.
std::size_t majority_vote(const std::vector<Tensor64>& probs);

}  // namespace dyntex::classify
