#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dyntex/detect/box.hpp"
#include "dyntex/detect/features.hpp"
#include "dyntex/detect/losses.hpp"
#include "dyntex/detect/targets.hpp"
#include "dyntex/numerics/tensor.hpp"

namespace dyntex::detect {

/// Linear heads of one contrast phase over standardised features.
struct PhaseHeads {
  std::vector<double> mean, stdev;                   // feature standardisation
  std::vector<double> heat_w;                         // logistic heatmap head
  double heat_b = 0.0;
  std::array<std::array<double, kNumOffsetFeatures + 1>, 3> offset{};  // weights then bias, per axis
  std::array<std::array<double, kNumSizeFeatures>, 3> size{};          // last size feature is the constant 1
};

struct DetectorModel {
  FeatureConfig features;
  std::array<PhaseHeads, 4> phases;  // NC, A, V, D
};

struct DetectorTrainConfig {
  std::size_t epochs = 30;
  double learning_rate = 0.002;
  double head_learning_rate = 0.02;  // offset and size heads
  std::size_t head_iterations = 1500;
  double prior = 0.01;               // initial heatmap probability
  double grad_clip = 10.0;           // max gradient norm per step
  std::uint64_t seed = 0;
  LossConfig loss;
  SigmaRule sigma;
};

struct DetectorStudy {
  std::array<Volume, 4> phases;     // NC, A, V, D
  std::vector<Box3D> boxes;         // training targets in source voxel coordinates
};

struct DetectorTrainReport {
  std::array<double, 4> first_epoch_loss{};
  std::array<double, 4> last_epoch_loss{};
};

/// Heatmap target for one study on the detection grid.
HeatTarget detection_target(const std::vector<Box3D>& boxes, const FeatureBank& bank, const SigmaRule& rule = {});

DetectorModel train_detector(const std::vector<DetectorStudy>& studies, const FeatureConfig& features,
                             const DetectorTrainConfig& cfg, DetectorTrainReport* report = nullptr);

/// Heatmap, offsets and sizes of one phase on the detection grid.
struct HeadOutputs {
  Grid3<double> heatmap;
  VectorField offsets;
  VectorField sizes;
};
HeadOutputs run_heads(const PhaseHeads& heads, const FeatureBank& bank);

/// Candidates of a single phase volume, boxes in source voxel coordinates.
std::vector<DetectionCandidate> detect_phase(const DetectorModel& model, const Volume& vol, std::size_t topk);

/// Per-phase detection, pooled and NMS-merged, then the top-k by score.
std::vector<DetectionCandidate> detect_study(const DetectorModel& model, const std::array<Volume, 4>& phases,
                                             std::size_t topk, double nms_iou);

/// Named parameter tensors for checkpointing, and the inverse.
std::vector<std::pair<std::string, Tensor64>> detector_parameters(const DetectorModel& model);
DetectorModel detector_from_parameters(const FeatureConfig& features,
                                       const std::vector<std::pair<std::string, Tensor64>>& params);

}  // namespace dyntex::detect
