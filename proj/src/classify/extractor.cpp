#include "dyntex/classify/extractor.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "dyntex/numerics/activation.hpp"
#include "dyntex/numerics/conv.hpp"

namespace dyntex::classify {

std::string_view descriptor_mode_name(DescriptorMode m) { return m == DescriptorMode::Conv ? "conv" : "raw"; }

DescriptorMode parse_descriptor_mode(std::string_view s) {
  if (s == "conv") return DescriptorMode::Conv;
  if (s == "raw") return DescriptorMode::RawPatch;
  throw std::invalid_argument("unknown descriptor mode '" + std::string(s) + "'");
}

std::size_t Extractor::descriptor_dim() const {
  if (mode == DescriptorMode::RawPatch) return in_channels * patch * patch;
  return layers.empty() ? in_channels : layers.back().kernels.extent(0);
}

Extractor init_extractor(DescriptorMode mode, std::size_t in_channels, const std::vector<std::size_t>& widths, Rng& rng) {
  Extractor ex;
  ex.mode = mode;
  ex.in_channels = in_channels;
  if (mode == DescriptorMode::RawPatch) return ex;
  std::size_t c = in_channels;
  for (std::size_t f : widths) {
    ConvLayer layer{Tensor64({f, c, 3, 3}), Tensor64({f}, 0.0), 2};
    const double bound = std::sqrt(6.0 / static_cast<double>(c * 9));
    for (auto& v : layer.kernels.storage()) v = rng.uniform(-bound, bound);
    ex.layers.push_back(std::move(layer));
    c = f;
  }
  return ex;
}

std::size_t min_input_side(const Extractor& ex) {
  if (ex.mode == DescriptorMode::RawPatch) return ex.patch;
  return 3;  // every stride-2 layer maps a side >= 3 to >= 2, then >= 1
}

Tensor64 extractor_forward(const Extractor& ex, const Tensor64& image, ExtractorTrace* trace) {
  if (image.rank() != 3 || image.extent(0) != ex.in_channels) {
    throw std::invalid_argument("extractor: expected [" + std::to_string(ex.in_channels) + ",H,W] input, got " +
                                shape_string(image.shape()));
  }
  if (ex.mode == DescriptorMode::RawPatch) {
    const std::size_t C = image.extent(0), H = image.extent(1), W = image.extent(2), p = ex.patch;
    if (H < p || W < p) throw std::invalid_argument("extractor: image smaller than one patch: " + shape_string(image.shape()));
    const std::size_t h = H / p, w = W / p;
    Tensor64 out({C * p * p, h, w});
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t dy = 0; dy < p; ++dy)
        for (std::size_t dx = 0; dx < p; ++dx)
          for (std::size_t y = 0; y < h; ++y)
            for (std::size_t x = 0; x < w; ++x) out(((c * p) + dy) * p + dx, y, x) = image(c, y * p + dy, x * p + dx);
    return out;
  }
  if (trace) {
    trace->inputs.clear();
    trace->pre.clear();
  }
  Tensor64 x = image;
  for (const auto& layer : ex.layers) {
    if (x.extent(1) < 3 || x.extent(2) < 3) {
      // Pad tiny maps up to the kernel size so the stack always produces descriptors.
      Tensor64 padded({x.extent(0), std::max<std::size_t>(3, x.extent(1)), std::max<std::size_t>(3, x.extent(2))}, 0.0);
      for (std::size_t c = 0; c < x.extent(0); ++c)
        for (std::size_t y = 0; y < x.extent(1); ++y)
          for (std::size_t xx = 0; xx < x.extent(2); ++xx) padded(c, y, xx) = x(c, y, xx);
      x = std::move(padded);
    }
    Tensor64 z = conv2d_forward(x, layer.kernels, layer.bias, layer.stride);
    if (trace) {
      trace->inputs.push_back(x);
      trace->pre.push_back(z);
    }
    x = relu_forward(z);
  }
  return x;
}

ExtractorGrads extractor_backward(const Extractor& ex, const ExtractorTrace& trace, const Tensor64& upstream) {
  ExtractorGrads g;
  if (ex.mode == DescriptorMode::RawPatch) return g;
  if (trace.inputs.size() != ex.layers.size()) throw std::invalid_argument("extractor_backward: missing forward trace");
  g.kernels.resize(ex.layers.size());
  g.bias.resize(ex.layers.size());
  Tensor64 up = upstream;
  for (std::size_t l = ex.layers.size(); l-- > 0;) {
    const Tensor64 dz = relu_backward(trace.pre[l], up);
    auto cg = conv2d_backward(trace.inputs[l], ex.layers[l].kernels, dz, ex.layers[l].stride);
    g.kernels[l] = std::move(cg.kernels);
    g.bias[l] = std::move(cg.bias);
    if (l > 0) {
      // Undo any zero padding added in the forward pass.
      const auto& prev = trace.pre[l - 1].shape();
      if (cg.input.shape() != prev) {
        Tensor64 crop(prev);
        for (std::size_t c = 0; c < prev[0]; ++c)
          for (std::size_t y = 0; y < prev[1]; ++y)
            for (std::size_t x = 0; x < prev[2]; ++x) crop(c, y, x) = cg.input(c, y, x);
        up = std::move(crop);
      } else {
        up = std::move(cg.input);
      }
    }
  }
  return g;
}

}  // namespace dyntex::classify
