#include "dyntex/detect/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dyntex::detect {
namespace {

std::size_t require_centers(const HeatTarget& target, const char* what) {
  const std::size_t n = target.num_centers();
  if (n == 0) throw std::invalid_argument(std::string(what) + ": target has no centre cells");
  return n;
}

double clip(double v) { return std::clamp(v, kHeatClip, 1.0 - kHeatClip); }

// Small integer exponents (the defaults) avoid std::pow in the per-cell loops.
double power(double x, double e) {
  if (e >= 0.0 && e <= 8.0 && e == std::floor(e)) {
    double r = 1.0;
    for (int i = 0; i < static_cast<int>(e); ++i) r *= x;
    return r;
  }
  return std::pow(x, e);
}

double l1_center_loss(const VectorField& pred, const VectorField& truth, const HeatTarget& target, const char* what) {
  const std::size_t n = require_centers(target, what);
  for (int a = 0; a < 3; ++a) {
    if (pred[a].dims != target.heatmap.dims) throw std::invalid_argument(std::string(what) + ": prediction grid mismatch");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < target.center_mask.size(); ++i) {
    if (!target.center_mask.data[i]) continue;
    for (int a = 0; a < 3; ++a) total += std::abs(pred[a].data[i] - truth[a].data[i]);
  }
  return total / static_cast<double>(n);
}

}  // namespace

double heatmap_focal_loss(const Grid3<double>& pred, const HeatTarget& target, const LossConfig& cfg) {
  const std::size_t n = require_centers(target, "heatmap_focal_loss");
  if (pred.dims != target.heatmap.dims) throw std::invalid_argument("heatmap_focal_loss: prediction grid mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double p = clip(pred.data[i]);
    const double y = target.heatmap.data[i];
    if (y == 1.0) {
      total += power(1.0 - p, cfg.alpha) * std::log(p);
    } else {
      total += power(1.0 - y, cfg.beta) * power(p, cfg.alpha) * std::log(1.0 - p);
    }
  }
  return -total / static_cast<double>(n);
}

Grid3<double> heatmap_focal_loss_grad(const Grid3<double>& pred, const HeatTarget& target, const LossConfig& cfg) {
  const std::size_t n = require_centers(target, "heatmap_focal_loss");
  if (pred.dims != target.heatmap.dims) throw std::invalid_argument("heatmap_focal_loss: prediction grid mismatch");
  Grid3<double> g(pred.dims, 0.0);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double raw = pred.data[i];
    if (raw <= kHeatClip || raw >= 1.0 - kHeatClip) continue;
    const double p = raw;
    const double y = target.heatmap.data[i];
    double d;
    if (y == 1.0) {
      // d/dp [(1-p)^a log p]
      d = -cfg.alpha * power(1.0 - p, cfg.alpha - 1.0) * std::log(p) + power(1.0 - p, cfg.alpha) / p;
    } else {
      // d/dp [(1-y)^b p^a log(1-p)]
      d = power(1.0 - y, cfg.beta) *
          (cfg.alpha * power(p, cfg.alpha - 1.0) * std::log(1.0 - p) - power(p, cfg.alpha) / (1.0 - p));
    }
    g.data[i] = -d * inv_n;
  }
  return g;
}

double offset_loss(const VectorField& pred, const HeatTarget& target) {
  return l1_center_loss(pred, target.offsets, target, "offset_loss");
}

double size_loss(const VectorField& pred, const HeatTarget& target) {
  return l1_center_loss(pred, target.sizes, target, "size_loss");
}

VectorField l1_center_loss_grad(const VectorField& pred, const VectorField& truth, const HeatTarget& target) {
  const std::size_t n = require_centers(target, "l1 loss");
  VectorField g;
  for (int a = 0; a < 3; ++a) g[a] = Grid3<double>(target.heatmap.dims, 0.0);
  for (std::size_t i = 0; i < target.center_mask.size(); ++i) {
    if (!target.center_mask.data[i]) continue;
    for (int a = 0; a < 3; ++a) {
      const double d = pred[a].data[i] - truth[a].data[i];
      g[a].data[i] = (d > 0 ? 1.0 : d < 0 ? -1.0 : 0.0) / static_cast<double>(n);
    }
  }
  return g;
}

double total_loss(const LossParts& parts, const LossConfig& cfg) {
  return parts.heatmap + cfg.lambda_size * parts.size + cfg.lambda_off * parts.offset;
}

}  // namespace dyntex::detect
