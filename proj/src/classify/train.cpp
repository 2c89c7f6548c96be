#include "dyntex/classify/train.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "dyntex/classify/focal.hpp"

namespace dyntex::classify {

std::size_t argmax(const Tensor64& probs) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < probs.size(); ++c)
    if (probs[c] > probs[best]) best = c;
  return best;
}

ClassifierModel init_model(const std::vector<LabeledInput>& data, std::size_t in_channels, std::size_t num_classes,
                           const TrainConfig& cfg) {
  if (data.empty()) throw std::invalid_argument("classifier: empty training set");
  Rng rng(derive_seed(cfg.seed, 1));
  ClassifierModel m;
  m.extractor = init_extractor(cfg.descriptor, in_channels, cfg.widths, rng);

  double sum = 0.0, sq = 0.0, n = 0.0;
  const std::size_t warm = std::min<std::size_t>(data.size(), 64);
  for (std::size_t i = 0; i < warm; ++i) {
    const Tensor64 fmap = extractor_forward(m.extractor, data[i].input.image, nullptr);
    for (double v : fmap.storage()) {
      sum += v;
      sq += v * v;
      n += 1.0;
    }
  }
  const double mean = sum / n;
  const double sigma = std::sqrt(std::max(sq / n - mean * mean, 1e-12));
  const std::size_t dim = m.extractor.descriptor_dim();
  m.codebook = texture::init_codebook(cfg.codewords, dim, sigma, rng);
  m.head = init_head(num_classes, cfg.codewords * dim, 1.0 / std::sqrt(double(cfg.codewords * dim)), rng);
  return m;
}

void train_epochs(ClassifierModel& model, const std::vector<LabeledInput>& data, const TrainConfig& cfg,
                  TrainReport* report) {
  if (data.empty()) throw std::invalid_argument("classifier: empty training set");
  if (cfg.batch_size == 0) throw std::invalid_argument("classifier: batch size must be >= 1");
  const LossSpec loss{cfg.class_weights, cfg.gamma_focal};
  auto params = model_parameters(model);
  std::vector<Tensor64> velocity;
  for (auto* p : params) velocity.emplace_back(p->shape(), 0.0);

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(cfg.seed, 2));

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t B = std::min(cfg.batch_size, order.size() - start);
      std::vector<std::vector<Tensor64>> grads(B);
      std::vector<double> losses(B);
      // Samples are independent; the reduction below runs in a fixed order.
#pragma omp parallel for schedule(dynamic)
      for (std::size_t b = 0; b < B; ++b) {
        const auto& s = data[order[start + b]];
        losses[b] = loss_and_grad(model, s.input, s.label, loss, &grads[b]);
      }
      for (std::size_t j = 0; j < params.size(); ++j) {
        auto& v = velocity[j].storage();
        for (auto& x : v) x *= cfg.momentum;
        for (std::size_t b = 0; b < B; ++b) {
          const auto& g = grads[b][j].storage();
          for (std::size_t i = 0; i < v.size(); ++i) v[i] += g[i] / static_cast<double>(B);
        }
        auto& p = params[j]->storage();
        for (std::size_t i = 0; i < p.size(); ++i) p[i] -= cfg.learning_rate * v[i];
      }
      for (double l : losses) epoch_loss += l;
    }
    if (report) report->epoch_loss.push_back(epoch_loss / static_cast<double>(data.size()));
  }
}

ClassifierModel train_classifier(const std::vector<LabeledInput>& data, std::size_t num_classes,
                                 const TrainConfig& cfg, TrainReport* report) {
  if (data.empty()) throw std::invalid_argument("classifier: empty training set");
  std::vector<std::size_t> counts(num_classes, 0);
  for (const auto& s : data) {
    if (s.label >= num_classes) throw std::invalid_argument("classifier: label " + std::to_string(s.label) + " out of range");
    ++counts[s.label];
  }
  if (cfg.class_weights.size() != num_classes) {
    throw std::invalid_argument("classifier: " + std::to_string(cfg.class_weights.size()) + " class weights for " +
                                std::to_string(num_classes) + " classes");
  }
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (counts[c] == 0) {
      const std::string msg = "class " + std::to_string(c) + " has no training samples";
      spdlog::warn("{}", msg);
      if (report) report->warnings.push_back(msg);
    }
  }
  ClassifierModel model = init_model(data, data.front().input.image.extent(0), num_classes, cfg);
  train_epochs(model, data, cfg, report);
  return model;
}

}  // namespace dyntex::classify
