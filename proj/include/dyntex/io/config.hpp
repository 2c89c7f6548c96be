#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dyntex/classify/roi.hpp"
#include "dyntex/classify/train.hpp"
#include "dyntex/detect/detector.hpp"
#include "dyntex/detect/targets.hpp"
#include "dyntex/io/json_util.hpp"
#include "dyntex/lesion_class.hpp"

namespace dyntex::io {

/// Every tunable default as one flat document. Unknown keys are rejected and
/// values are validated on load.
struct Config {
  std::uint64_t seed = 7;

  // detection
  std::array<std::size_t, 3> det_grid{48, 48, 20};
  std::vector<double> det_scales_mm{2.5, 5.0, 8.0};
  double det_intensity_scale_hu = 40.0;
  std::size_t det_epochs = 30;
  double det_learning_rate = 0.002;
  double det_head_learning_rate = 0.02;
  std::size_t det_head_iterations = 1500;
  double det_prior = 0.01;
  double det_grad_clip = 10.0;
  double focal_alpha = 2.0;
  double focal_beta = 4.0;
  double lambda_size = 0.1;
  double lambda_off = 1.0;
  double sigma_divisor = 6.0;   // sigma_p = max(sigma_min, min(s) / (sigma_divisor * R))
  double sigma_min = 1.0;
  double nms_iou = 0.3;
  std::size_t topk = 10;
  double hit_iou = 0.3;

  // key slices and primary selection
  double pts_threshold = 0.5;
  double crop_margin = 0.25;      // key-slice filter, montage
  double lesion_crop_margin = 0.5;  // four-class lesion classifier
  std::size_t train_slices = 5;

  // classifier
  std::size_t codewords = 8;
  std::vector<std::size_t> conv_widths{8, 16};
  std::string descriptor = "conv";
  double cls_learning_rate = 0.004;
  double cls_momentum = 0.9;
  double gamma_focal = 2.0;
  std::vector<double> class_weights{5.0, 1.0, 1.0, 2.0};
  std::vector<double> ksf_class_weights{};  // empty: balance by inverse frequency
  std::size_t cls_epochs = 50;
  std::size_t batch_size = 16;
  std::size_t ensemble = 5;
  double hu_center = 80.0;
  double hu_scale = 60.0;
  std::size_t deepten_size = 32;
  std::string mask_source = "box";

  // harvesting
  double window_level = 50.0;
  double window_width = 400.0;
  std::size_t montage_cell = 64;
  double qa_minutes = 1.0;
  double manual_minutes = 15.0;

  detect::FeatureConfig feature_config() const;
  detect::DetectorTrainConfig detector_train_config() const;
  classify::TrainConfig classifier_train_config() const;
  classify::RoiConfig roi_config() const;
};

Json config_to_json(const Config& c);
/// Starts from the defaults; keys present in `j` override them.
Config config_from_json(const Json& j);
Config load_config(const fs::path& path);

/// Throws std::invalid_argument on the first invalid value.
void validate_config(const Config& c);

}  // namespace dyntex::io
