#include "dyntex/io/config.hpp"

#include <functional>
#include <map>

namespace dyntex::io {
namespace {

// One accessor pair per key keeps serialisation and the unknown-key check in sync.
struct Field {
  std::function<Json(const Config&)> get;
  std::function<void(Config&, const Json&)> set;
};

template <typename T>
Field field(T Config::*member) {
  return {[member](const Config& c) { return Json(c.*member); },
          [member](Config& c, const Json& j) { c.*member = j.get<T>(); }};
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> f = {
      {"seed", field(&Config::seed)},
      {"det_grid", field(&Config::det_grid)},
      {"det_scales_mm", field(&Config::det_scales_mm)},
      {"det_intensity_scale_hu", field(&Config::det_intensity_scale_hu)},
      {"det_epochs", field(&Config::det_epochs)},
      {"det_learning_rate", field(&Config::det_learning_rate)},
      {"det_head_learning_rate", field(&Config::det_head_learning_rate)},
      {"det_head_iterations", field(&Config::det_head_iterations)},
      {"det_prior", field(&Config::det_prior)},
      {"det_grad_clip", field(&Config::det_grad_clip)},
      {"focal_alpha", field(&Config::focal_alpha)},
      {"focal_beta", field(&Config::focal_beta)},
      {"lambda_size", field(&Config::lambda_size)},
      {"lambda_off", field(&Config::lambda_off)},
      {"sigma_divisor", field(&Config::sigma_divisor)},
      {"sigma_min", field(&Config::sigma_min)},
      {"nms_iou", field(&Config::nms_iou)},
      {"topk", field(&Config::topk)},
      {"hit_iou", field(&Config::hit_iou)},
      {"pts_threshold", field(&Config::pts_threshold)},
      {"crop_margin", field(&Config::crop_margin)},
      {"lesion_crop_margin", field(&Config::lesion_crop_margin)},
      {"train_slices", field(&Config::train_slices)},
      {"codewords", field(&Config::codewords)},
      {"conv_widths", field(&Config::conv_widths)},
      {"descriptor", field(&Config::descriptor)},
      {"cls_learning_rate", field(&Config::cls_learning_rate)},
      {"cls_momentum", field(&Config::cls_momentum)},
      {"gamma_focal", field(&Config::gamma_focal)},
      {"class_weights", field(&Config::class_weights)},
      {"ksf_class_weights", field(&Config::ksf_class_weights)},
      {"cls_epochs", field(&Config::cls_epochs)},
      {"batch_size", field(&Config::batch_size)},
      {"ensemble", field(&Config::ensemble)},
      {"hu_center", field(&Config::hu_center)},
      {"hu_scale", field(&Config::hu_scale)},
      {"deepten_size", field(&Config::deepten_size)},
      {"mask_source", field(&Config::mask_source)},
      {"window_level", field(&Config::window_level)},
      {"window_width", field(&Config::window_width)},
      {"montage_cell", field(&Config::montage_cell)},
      {"qa_minutes", field(&Config::qa_minutes)},
      {"manual_minutes", field(&Config::manual_minutes)},
  };
  return f;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument("config: " + msg);
}

bool positive_all(const std::vector<double>& v) {
  for (double x : v)
    if (!(x > 0)) return false;
  return true;
}

}  // namespace

detect::FeatureConfig Config::feature_config() const {
  detect::FeatureConfig f;
  f.grid = {det_grid[0], det_grid[1], det_grid[2]};
  f.scales_mm = det_scales_mm;
  f.intensity_scale_hu = det_intensity_scale_hu;
  return f;
}

detect::DetectorTrainConfig Config::detector_train_config() const {
  detect::DetectorTrainConfig d;
  d.epochs = det_epochs;
  d.learning_rate = det_learning_rate;
  d.head_learning_rate = det_head_learning_rate;
  d.head_iterations = det_head_iterations;
  d.prior = det_prior;
  d.grad_clip = det_grad_clip;
  d.seed = seed;
  d.loss = {focal_alpha, focal_beta, lambda_size, lambda_off};
  d.sigma = {sigma_divisor, sigma_min};
  return d;
}

classify::TrainConfig Config::classifier_train_config() const {
  classify::TrainConfig t;
  t.learning_rate = cls_learning_rate;
  t.momentum = cls_momentum;
  t.gamma_focal = gamma_focal;
  t.epochs = cls_epochs;
  t.batch_size = batch_size;
  t.seed = seed;
  t.class_weights = class_weights;
  t.codewords = codewords;
  t.widths = conv_widths;
  t.descriptor = classify::parse_descriptor_mode(descriptor);
  return t;
}

classify::RoiConfig Config::roi_config() const {
  classify::RoiConfig r;
  r.hu_center = hu_center;
  r.hu_scale = hu_scale;
  r.deepten_size = deepten_size;
  r.mask_source = mask_source == "segmentation" ? classify::MaskSource::Segmentation : classify::MaskSource::Box;
  return r;
}

Json config_to_json(const Config& c) {
  Json j = Json::object();
  for (const auto& [key, f] : fields()) j[key] = f.get(c);
  return j;
}

Config config_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  Config c;
  for (const auto& [key, value] : j.items()) {
    const auto it = fields().find(key);
    if (it == fields().end()) throw std::invalid_argument("config: unknown key '" + key + "'");
    try {
      it->second.set(c, value);
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("config: key '" + key + "': " + e.what());
    }
  }
  validate_config(c);
  return c;
}

Config load_config(const fs::path& path) {
  try {
    return config_from_json(read_json(path));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

void validate_config(const Config& c) {
  require(c.det_grid[0] >= 3 && c.det_grid[1] >= 3 && c.det_grid[2] >= 3, "det_grid extents must be >= 3");
  require(!c.det_scales_mm.empty() && positive_all(c.det_scales_mm), "det_scales_mm must be non-empty and positive");
  require(c.det_intensity_scale_hu > 0, "det_intensity_scale_hu must be > 0");
  require(c.det_epochs >= 1, "det_epochs must be >= 1");
  require(c.det_learning_rate > 0 && c.det_head_learning_rate > 0, "detector learning rates must be > 0");
  require(c.det_prior > 0 && c.det_prior < 1, "det_prior must lie in (0,1)");
  require(c.det_grad_clip > 0, "det_grad_clip must be > 0");
  require(c.focal_alpha >= 0 && c.focal_beta >= 0, "focal exponents must be >= 0");
  require(c.lambda_size >= 0 && c.lambda_off >= 0, "loss weights must be >= 0");
  require(c.sigma_divisor > 0 && c.sigma_min > 0, "sigma rule values must be > 0");
  require(c.nms_iou >= 0 && c.nms_iou <= 1, "nms_iou must lie in [0,1]");
  require(c.topk >= 1, "topk must be >= 1");
  require(c.hit_iou >= 0 && c.hit_iou <= 1, "hit_iou must lie in [0,1]");
  require(c.pts_threshold >= 0 && c.pts_threshold <= 1, "pts_threshold must lie in [0,1]");
  require(c.crop_margin >= 0, "crop_margin must be >= 0");
  require(c.lesion_crop_margin >= 0, "lesion_crop_margin must be >= 0");
  require(c.train_slices >= 1, "train_slices must be >= 1");
  require(c.codewords >= 1, "codewords must be >= 1");
  require(!c.conv_widths.empty(), "conv_widths must be non-empty");
  for (auto w : c.conv_widths) require(w >= 1, "conv_widths entries must be >= 1");
  require(c.descriptor == "conv" || c.descriptor == "raw", "descriptor must be conv or raw");
  require(c.cls_learning_rate > 0, "cls_learning_rate must be > 0");
  require(c.cls_momentum >= 0 && c.cls_momentum < 1, "cls_momentum must lie in [0,1)");
  require(c.gamma_focal >= 0, "gamma_focal must be >= 0");
  require(c.class_weights.size() == kNumLesionClasses && positive_all(c.class_weights),
          "class_weights must hold 4 positive values");
  require(c.ksf_class_weights.empty() || (c.ksf_class_weights.size() == 2 && positive_all(c.ksf_class_weights)),
          "ksf_class_weights must be empty or hold 2 positive values");
  require(c.cls_epochs >= 1 && c.batch_size >= 1, "cls_epochs and batch_size must be >= 1");
  require(c.ensemble >= 1, "ensemble must be >= 1");
  require(c.hu_scale > 0, "hu_scale must be > 0");
  require(c.deepten_size >= 4, "deepten_size must be >= 4");
  require(c.mask_source == "box" || c.mask_source == "segmentation", "mask_source must be box or segmentation");
  require(c.window_width > 0, "window_width must be > 0");
  require(c.montage_cell >= 4, "montage_cell must be >= 4");
  require(c.qa_minutes >= 0 && c.manual_minutes > 0, "qa_minutes must be >= 0 and manual_minutes > 0");
}

}  // namespace dyntex::io
