#include "dyntex/detect/box.hpp"

#include <algorithm>
#include <stdexcept>

namespace dyntex::detect {

CenterSize box_to_center_size(const Box3D& b) {
  if (!b.valid()) throw std::invalid_argument("box_to_center_size: degenerate box");
  return {{(b.x1 + b.x2) / 2.0, (b.y1 + b.y2) / 2.0, (b.z1 + b.z2) / 2.0}, {b.x2 - b.x1, b.y2 - b.y1, b.z2 - b.z1}};
}

Box3D center_size_to_box(const CenterSize& cs) {
  if (!(cs.s[0] > 0 && cs.s[1] > 0 && cs.s[2] > 0)) throw std::invalid_argument("center_size_to_box: non-positive size");
  return {cs.p[0] - cs.s[0] / 2.0, cs.p[1] - cs.s[1] / 2.0, cs.p[2] - cs.s[2] / 2.0,
          cs.p[0] + cs.s[0] / 2.0, cs.p[1] + cs.s[1] / 2.0, cs.p[2] + cs.s[2] / 2.0};
}

double iou3d(const Box3D& a, const Box3D& b) {
  const double ix = std::max(0.0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
  const double iy = std::max(0.0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
  const double iz = std::max(0.0, std::min(a.z2, b.z2) - std::max(a.z1, b.z1));
  const double inter = ix * iy * iz;
  const double uni = a.volume() + b.volume() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

Box3D scale_box(const Box3D& b, const Vec3& f) {
  return {b.x1 * f[0], b.y1 * f[1], b.z1 * f[2], b.x2 * f[0], b.y2 * f[1], b.z2 * f[2]};
}

std::vector<DetectionCandidate> nms_merge(const std::vector<DetectionCandidate>& cands, double iou_thresh) {
  std::vector<std::size_t> order(cands.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cands[a].score > cands[b].score; });
  std::vector<DetectionCandidate> kept;
  for (auto i : order) {
    const auto& c = cands[i];
    const bool suppressed = std::any_of(kept.begin(), kept.end(),
                                        [&](const DetectionCandidate& k) { return iou3d(k.box, c.box) >= iou_thresh; });
    if (!suppressed) kept.push_back(c);
  }
  return kept;
}

}  // namespace dyntex::detect
