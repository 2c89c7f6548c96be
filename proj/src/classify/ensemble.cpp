#include "dyntex/classify/ensemble.hpp"

#include <stdexcept>

#include "dyntex/classify/train.hpp"

namespace dyntex::classify {

std::size_t majority_vote(const std::vector<std::size_t>& predictions, const std::vector<Tensor64>& probs) {
  if (predictions.empty()) throw std::invalid_argument("majority_vote: no models");
  if (probs.size() != predictions.size()) throw std::invalid_argument("majority_vote: one probability vector per model");
  const std::size_t C = probs.front().size();
  std::vector<std::size_t> votes(C, 0);
  std::vector<double> mean(C, 0.0);
  for (std::size_t m = 0; m < predictions.size(); ++m) {
    if (predictions[m] >= C || probs[m].size() != C) throw std::invalid_argument("majority_vote: inconsistent class count");
    ++votes[predictions[m]];
    for (std::size_t c = 0; c < C; ++c) mean[c] += probs[m][c];
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < C; ++c) {
    if (votes[c] > votes[best] || (votes[c] == votes[best] && mean[c] > mean[best])) best = c;
  }
  return best;
}

std::size_t majority_vote(const std::vector<Tensor64>& probs) {
  std::vector<std::size_t> preds;
  for (const auto& p : probs) preds.push_back(argmax(p));
  return majority_vote(preds, probs);
}

}  // namespace dyntex::classify
