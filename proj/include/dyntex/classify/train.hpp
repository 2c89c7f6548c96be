#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dyntex/classify/model.hpp"

namespace dyntex::classify {

struct TrainConfig {
  double learning_rate = 0.004;
  double momentum = 0.9;
  double gamma_focal = 2.0;
  std::size_t epochs = 50;
  std::size_t batch_size = 16;
  std::uint64_t seed = 0;
  std::vector<double> class_weights = {5.0, 1.0, 1.0, 2.0};
  std::size_t codewords = 8;                 // K
  std::vector<std::size_t> widths = {8, 16};  // conv filters per layer; Dd = last
  DescriptorMode descriptor = DescriptorMode::Conv;
};

struct LabeledInput {
  ClassifierInput input;
  std::size_t label = 0;
};

struct TrainReport {
  std::vector<double> epoch_loss;  // mean sample loss per epoch
  std::vector<std::string> warnings;
};

/// Fresh model: extractor and head from the seed, codewords uniform in
/// [-s, s] with s the descriptor standard deviation over a warm-up pass.
ClassifierModel init_model(const std::vector<LabeledInput>& data, std::size_t in_channels, std::size_t num_classes,
                           const TrainConfig& cfg);

/// Mini-batch SGD with momentum on the weighted focal loss, mean reduction
/// per batch. Bit-reproducible for a fixed seed.
ClassifierModel train_classifier(const std::vector<LabeledInput>& data, std::size_t num_classes,
                                 const TrainConfig& cfg, TrainReport* report = nullptr);

/// Continues training an existing model (used by the tests for lr = 0).
void train_epochs(ClassifierModel& model, const std::vector<LabeledInput>& data, const TrainConfig& cfg,
                  TrainReport* report);

std::size_t argmax(const Tensor64& probs);

}  // namespace dyntex::classify
