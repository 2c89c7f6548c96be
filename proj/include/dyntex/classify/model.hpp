#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dyntex/classify/extractor.hpp"
#include "dyntex/classify/head.hpp"
#include "dyntex/texture/encoding.hpp"

namespace dyntex::classify {

/// Descriptor extractor -> masked texture encoding -> linear softmax head.
struct ClassifierModel {
  Extractor extractor;
  texture::Codebook codebook;
  HeadParams head;

  std::size_t num_classes() const { return head.num_classes(); }
};

/// One 2D sample: image channels [C,H,W] and the binary aggregation mask [H,W]
/// (all ones when aggregating everywhere).
struct ClassifierInput {
  Tensor64 image;
  Tensor64 pixel_mask;
};

struct ModelTrace {
  ExtractorTrace extractor;
  texture::DescriptorField field;
  texture::AggregationMask mask;
  texture::Encoding encoding;
  Tensor64 probs;
};

Tensor64 predict_proba(const ClassifierModel& model, const ClassifierInput& input, ModelTrace* trace = nullptr);

/// Parameter tensors in a fixed order shared by gradients and checkpoints.
std::vector<Tensor64*> model_parameters(ClassifierModel& model);
std::vector<const Tensor64*> model_parameters(const ClassifierModel& model);
std::vector<std::string> model_parameter_names(const ClassifierModel& model);

struct LossSpec {
  std::vector<double> class_weights;
  double gamma = 2.0;
};

/// Loss of one sample and its gradient for every tensor of model_parameters().
double loss_and_grad(const ClassifierModel& model, const ClassifierInput& input, std::size_t label,
                     const LossSpec& loss, std::vector<Tensor64>* grads);

}  // namespace dyntex::classify
