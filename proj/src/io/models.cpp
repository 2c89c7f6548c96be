#include "dyntex/io/models.hpp"

namespace dyntex::io {
namespace {

std::string_view mask_source_name(classify::MaskSource m) {
  return m == classify::MaskSource::Box ? "box" : "segmentation";
}

classify::MaskSource parse_mask_source(const std::string& s) {
  if (s == "box") return classify::MaskSource::Box;
  if (s == "segmentation") return classify::MaskSource::Segmentation;
  throw IoError("unknown mask source '" + s + "'");
}

}  // namespace

Checkpoint classifier_checkpoint(const ClassifierBundle& b) {
  Checkpoint ck;
  ck.kind = "classifier";
  const auto& ex = b.model.extractor;
  std::vector<std::size_t> widths;
  for (const auto& l : ex.layers) widths.push_back(l.kernels.extent(0));
  ck.config = {{"task", b.task},
               {"input_mode", std::string(classify::input_mode_name(b.mode))},
               {"descriptor", std::string(classify::descriptor_mode_name(ex.mode))},
               {"in_channels", ex.in_channels},
               {"patch", ex.patch},
               {"widths", widths},
               {"codewords", b.model.codebook.codewords.extent(0)},
               {"num_classes", b.model.num_classes()},
               {"hu_center", b.roi.hu_center},
               {"hu_scale", b.roi.hu_scale},
               {"deepten_size", b.roi.deepten_size},
               {"mask_source", std::string(mask_source_name(b.roi.mask_source))},
               {"crop_margin", b.crop_margin}};
  const auto names = classify::model_parameter_names(b.model);
  const auto params = classify::model_parameters(b.model);
  for (std::size_t i = 0; i < names.size(); ++i) ck.tensors.emplace_back(names[i], *params[i]);
  return ck;
}

ClassifierBundle classifier_from_checkpoint(const Checkpoint& ck) {
  if (ck.kind != "classifier") throw IoError("expected a classifier checkpoint, got kind '" + ck.kind + "'");
  const std::string where = "classifier checkpoint";
  const Json& c = ck.config;
  ClassifierBundle b;
  b.task = get_field<std::string>(c, "task", where);
  if (b.task != "lesion" && b.task != "ksf") throw IoError(where + ": unknown task '" + b.task + "'");
  try {
    b.mode = classify::parse_input_mode(get_field<std::string>(c, "input_mode", where));
    b.model.extractor.mode = classify::parse_descriptor_mode(get_field<std::string>(c, "descriptor", where));
  } catch (const std::invalid_argument& e) {
    throw IoError(where + ": " + e.what());
  }
  b.roi.hu_center = get_field<double>(c, "hu_center", where);
  b.roi.hu_scale = get_field<double>(c, "hu_scale", where);
  b.roi.deepten_size = get_field<std::size_t>(c, "deepten_size", where);
  b.roi.mask_source = parse_mask_source(get_field<std::string>(c, "mask_source", where));
  b.crop_margin = get_field<double>(c, "crop_margin", where);

  auto& ex = b.model.extractor;
  ex.in_channels = get_field<std::size_t>(c, "in_channels", where);
  ex.patch = get_field<std::size_t>(c, "patch", where);
  const auto widths = get_field<std::vector<std::size_t>>(c, "widths", where);
  const auto K = get_field<std::size_t>(c, "codewords", where);
  const auto C = get_field<std::size_t>(c, "num_classes", where);
  std::size_t in = ex.in_channels;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    const std::string pre = "conv" + std::to_string(i) + ".";
    ex.layers.push_back({ck.tensor(pre + "kernels"), ck.tensor(pre + "bias"), 2});
    if (ex.layers.back().kernels.shape() != Shape{widths[i], in, 3, 3} || ex.layers.back().bias.shape() != Shape{widths[i]})
      throw IoError(where + ": layer " + std::to_string(i) + " has unexpected shapes");
    in = widths[i];
  }
  const std::size_t D = ex.descriptor_dim();
  b.model.codebook.codewords = ck.tensor("codebook.codewords");
  b.model.codebook.smoothing = ck.tensor("codebook.smoothing");
  b.model.head.weight = ck.tensor("head.weight");
  b.model.head.bias = ck.tensor("head.bias");
  if (b.model.codebook.codewords.shape() != Shape{K, D} || b.model.codebook.smoothing.shape() != Shape{K} ||
      b.model.head.weight.shape() != Shape{C, K * D} || b.model.head.bias.shape() != Shape{C}) {
    throw IoError(where + ": codebook or head shapes do not match the header");
  }
  return b;
}

Checkpoint detector_checkpoint(const detect::DetectorModel& m) {
  Checkpoint ck;
  ck.kind = "detector";
  const auto& f = m.features;
  ck.config = {{"grid", f.grid}, {"scales_mm", f.scales_mm}, {"intensity_scale_hu", f.intensity_scale_hu}};
  ck.tensors = detect::detector_parameters(m);
  return ck;
}

detect::DetectorModel detector_from_checkpoint(const Checkpoint& ck) {
  if (ck.kind != "detector") throw IoError("expected a detector checkpoint, got kind '" + ck.kind + "'");
  const std::string where = "detector checkpoint";
  detect::FeatureConfig f;
  f.grid = get_field<Dims3>(ck.config, "grid", where);
  f.scales_mm = get_field<std::vector<double>>(ck.config, "scales_mm", where);
  f.intensity_scale_hu = get_field<double>(ck.config, "intensity_scale_hu", where);
  try {
    return detect::detector_from_parameters(f, ck.tensors);
  } catch (const std::invalid_argument& e) {
    throw IoError(where + ": " + e.what());
  }
}

void save_classifiers(const fs::path& dir, const std::vector<ClassifierBundle>& members) {
  if (members.empty()) throw std::invalid_argument("save_classifiers: no members");
  Checkpoint head;
  head.kind = "ensemble";
  Json names = Json::array();
  for (std::size_t i = 0; i < members.size(); ++i) {
    const std::string name = "member" + std::to_string(i);
    save_checkpoint(dir / name, classifier_checkpoint(members[i]));
    names.push_back(name);
  }
  head.config = {{"members", names}};
  save_checkpoint(dir, head);
}

std::vector<ClassifierBundle> load_classifiers(const fs::path& dir) {
  const Checkpoint ck = load_checkpoint(dir);
  if (ck.kind == "classifier") return {classifier_from_checkpoint(ck)};
  if (ck.kind != "ensemble") throw IoError(dir.string() + ": not a classifier checkpoint (kind '" + ck.kind + "')");
  std::vector<ClassifierBundle> out;
  for (const auto& name : get_field<std::vector<std::string>>(ck.config, "members", dir.string()))
    out.push_back(classifier_from_checkpoint(load_checkpoint(dir / name)));
  if (out.empty()) throw IoError(dir.string() + ": ensemble has no members");
  return out;
}

detect::DetectorModel load_detector(const fs::path& dir) { return detector_from_checkpoint(load_checkpoint(dir)); }

void save_detector(const fs::path& dir, const detect::DetectorModel& m) { save_checkpoint(dir, detector_checkpoint(m)); }

}  // namespace dyntex::io
