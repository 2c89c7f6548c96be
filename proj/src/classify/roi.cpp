#include "dyntex/classify/roi.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dyntex::classify {

std::string_view input_mode_name(InputMode m) { return m == InputMode::Sadt ? "sadt" : "deepten"; }

InputMode parse_input_mode(std::string_view s) {
  if (s == "sadt") return InputMode::Sadt;
  if (s == "deepten") return InputMode::DeepTen;
  throw std::invalid_argument("unknown input mode '" + std::string(s) + "'");
}

Tensor64 resize_plane(const Tensor64& plane, std::size_t out_h, std::size_t out_w) {
  const std::size_t H = plane.extent(0), W = plane.extent(1);
  Tensor64 out({out_h, out_w});
  auto map = [](std::size_t i, std::size_t n_out, std::size_t n_in) {
    return n_out > 1 ? static_cast<double>(i) * static_cast<double>(n_in - 1) / static_cast<double>(n_out - 1) : 0.0;
  };
  for (std::size_t y = 0; y < out_h; ++y) {
    const double sy = map(y, out_h, H);
    const std::size_t y0 = std::min(static_cast<std::size_t>(sy), H - 1), y1 = std::min(y0 + 1, H - 1);
    const double ty = sy - static_cast<double>(y0);
    for (std::size_t x = 0; x < out_w; ++x) {
      const double sx = map(x, out_w, W);
      const std::size_t x0 = std::min(static_cast<std::size_t>(sx), W - 1), x1 = std::min(x0 + 1, W - 1);
      const double tx = sx - static_cast<double>(x0);
      const double top = plane(y0, x0) * (1 - tx) + plane(y0, x1) * tx;
      const double bot = plane(y1, x0) * (1 - tx) + plane(y1, x1) * tx;
      out(y, x) = top * (1 - ty) + bot * ty;
    }
  }
  return out;
}

ClassifierInput make_input(const pts::SliceCrop& crop, InputMode mode, const RoiConfig& cfg) {
  const Tensor64& mask = cfg.mask_source == MaskSource::Box ? crop.box_mask : crop.seg_mask;
  std::size_t H = mask.extent(0), W = mask.extent(1);
  std::array<Tensor64, kInputChannels> planes;
  for (std::size_t p = 0; p < 4; ++p) {
    planes[p] = crop.phases[p];
    for (auto& v : planes[p].storage()) v = (v - cfg.hu_center) / cfg.hu_scale;
  }
  // The baseline sees no lesion mask: its mask channel is constant.
  planes[4] = mode == InputMode::Sadt ? mask : Tensor64(mask.shape(), 1.0);
  if (mode == InputMode::DeepTen) {
    for (auto& pl : planes) pl = resize_plane(pl, cfg.deepten_size, cfg.deepten_size);
    H = W = cfg.deepten_size;
  }
  ClassifierInput in{Tensor64({kInputChannels, H, W}), Tensor64({H, W}, 1.0)};
  for (std::size_t c = 0; c < kInputChannels; ++c)
    for (std::size_t i = 0; i < H * W; ++i) in.image[c * H * W + i] = planes[c][i];
  if (mode == InputMode::Sadt) in.pixel_mask = mask;
  return in;
}

}  // namespace dyntex::classify
