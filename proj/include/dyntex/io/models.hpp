#pragma once

#include <string>
#include <vector>

#include "dyntex/classify/roi.hpp"
#include "dyntex/detect/detector.hpp"
#include "dyntex/io/checkpoint.hpp"

namespace dyntex::io {

/// A trained classifier plus everything needed to rebuild its inputs.
struct ClassifierBundle {
  classify::ClassifierModel model;
  classify::InputMode mode = classify::InputMode::Sadt;
  classify::RoiConfig roi;
  double crop_margin = 0.25;
  std::string task = "lesion";  // "lesion" (4 classes) or "ksf" (non-primary / primary)
};

Checkpoint classifier_checkpoint(const ClassifierBundle& b);
ClassifierBundle classifier_from_checkpoint(const Checkpoint& ck);

Checkpoint detector_checkpoint(const detect::DetectorModel& m);
detect::DetectorModel detector_from_checkpoint(const Checkpoint& ck);

/// One member per sub-directory `member<i>` and a header of kind "ensemble".
void save_classifiers(const fs::path& dir, const std::vector<ClassifierBundle>& members);
/// Accepts a single classifier checkpoint or an ensemble directory.
std::vector<ClassifierBundle> load_classifiers(const fs::path& dir);

detect::DetectorModel load_detector(const fs::path& dir);
void save_detector(const fs::path& dir, const detect::DetectorModel& m);

}  // namespace dyntex::io
