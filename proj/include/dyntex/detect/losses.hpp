#pragma once

#include <array>

#include "dyntex/detect/targets.hpp"

namespace dyntex::detect {

struct LossConfig {
  double alpha = 2.0;        // focal exponent on the prediction
  double beta = 4.0;         // penalty reduction exponent on the target
  double lambda_size = 0.1;
  double lambda_off = 1.0;
};

inline constexpr double kHeatClip = 1e-6;

/// Penalty-reduced pixelwise focal loss, normalised by the number of centres.
double heatmap_focal_loss(const Grid3<double>& pred, const HeatTarget& target, const LossConfig& cfg);
/// dL/dY_hat (zero where the prediction is clipped).
Grid3<double> heatmap_focal_loss_grad(const Grid3<double>& pred, const HeatTarget& target, const LossConfig& cfg);

using VectorField = std::array<Grid3<double>, 3>;

/// Mean over centre cells of the L1 distance between predicted and target offsets.
double offset_loss(const VectorField& pred, const HeatTarget& target);
/// Mean over centre cells of || s_hat - s ||_1.
double size_loss(const VectorField& pred, const HeatTarget& target);
/// Subgradient of the L1 losses above (sign at centre cells / N; 0 at ties).
VectorField l1_center_loss_grad(const VectorField& pred, const VectorField& truth, const HeatTarget& target);

struct LossParts {
  double heatmap = 0.0;
  double size = 0.0;
  double offset = 0.0;
};

double total_loss(const LossParts& parts, const LossConfig& cfg);

}  // namespace dyntex::detect
