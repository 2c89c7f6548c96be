#include "dyntex/classify/model.hpp"

#include <stdexcept>

#include "dyntex/classify/focal.hpp"

namespace dyntex::classify {

Tensor64 predict_proba(const ClassifierModel& model, const ClassifierInput& input, ModelTrace* trace) {
  ModelTrace local;
  ModelTrace& t = trace ? *trace : local;
  const Tensor64 fmap = extractor_forward(model.extractor, input.image, &t.extractor);
  t.field = texture::field_from_feature_map(fmap);
  if (input.pixel_mask.rank() != 2 || input.pixel_mask.extent(0) != input.image.extent(1) ||
      input.pixel_mask.extent(1) != input.image.extent(2)) {
    throw std::invalid_argument("classifier: mask " + shape_string(input.pixel_mask.shape()) + " does not match image " +
                                shape_string(input.image.shape()));
  }
  t.mask = texture::downsample_mask(input.pixel_mask, t.field.grid);
  t.encoding = texture::encode_forward(t.field, model.codebook, t.mask);
  t.probs = head_forward(t.encoding.flattened_normalized, model.head);
  return t.probs;
}

std::vector<Tensor64*> model_parameters(ClassifierModel& model) {
  std::vector<Tensor64*> out;
  for (auto& l : model.extractor.layers) {
    out.push_back(&l.kernels);
    out.push_back(&l.bias);
  }
  out.push_back(&model.codebook.codewords);
  out.push_back(&model.codebook.smoothing);
  out.push_back(&model.head.weight);
  out.push_back(&model.head.bias);
  return out;
}

std::vector<const Tensor64*> model_parameters(const ClassifierModel& model) {
  auto mut = model_parameters(const_cast<ClassifierModel&>(model));
  return {mut.begin(), mut.end()};
}

std::vector<std::string> model_parameter_names(const ClassifierModel& model) {
  std::vector<std::string> out;
  for (std::size_t l = 0; l < model.extractor.layers.size(); ++l) {
    out.push_back("conv" + std::to_string(l) + ".kernels");
    out.push_back("conv" + std::to_string(l) + ".bias");
  }
  for (const char* n : {"codebook.codewords", "codebook.smoothing", "head.weight", "head.bias"}) out.emplace_back(n);
  return out;
}

double loss_and_grad(const ClassifierModel& model, const ClassifierInput& input, std::size_t label,
                     const LossSpec& loss, std::vector<Tensor64>* grads) {
  ModelTrace t;
  const Tensor64 probs = predict_proba(model, input, &t);
  const double value = weighted_focal_loss(probs, label, loss.class_weights, loss.gamma);
  if (!grads) return value;

  const Tensor64 dz = weighted_focal_loss_grad_logits(probs, label, loss.class_weights, loss.gamma);
  HeadGrads hg = head_backward(t.encoding.flattened_normalized, model.head, dz);
  texture::EncodingGradients eg = texture::encode_backward(t.field, model.codebook, t.mask, t.encoding, hg.input);
  const Tensor64 dmap = texture::feature_map_from_field(eg.descriptors, t.field.grid);
  ExtractorGrads xg = extractor_backward(model.extractor, t.extractor, dmap);

  grads->clear();
  for (std::size_t l = 0; l < xg.kernels.size(); ++l) {
    grads->push_back(std::move(xg.kernels[l]));
    grads->push_back(std::move(xg.bias[l]));
  }
  grads->push_back(std::move(eg.codewords));
  grads->push_back(std::move(eg.smoothing));
  grads->push_back(std::move(hg.weight));
  grads->push_back(std::move(hg.bias));
  return value;
}

}  // namespace dyntex::classify
