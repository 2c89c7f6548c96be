#pragma once

#include <vector>

#include "dyntex/numerics/grid.hpp"
#include "dyntex/volume.hpp"

namespace dyntex::detect {

/// Axis-aligned box in continuous voxel coordinates.
struct Box3D {
  double x1 = 0, y1 = 0, z1 = 0, x2 = 0, y2 = 0, z2 = 0;

  bool valid() const { return x1 < x2 && y1 < y2 && z1 < z2; }
  double volume() const { return (x2 - x1) * (y2 - y1) * (z2 - z1); }
  friend bool operator==(const Box3D&, const Box3D&) = default;
};

struct CenterSize {
  Vec3 p{};  // centre
  Vec3 s{};  // extents

  friend bool operator==(const CenterSize&, const CenterSize&) = default;
};

CenterSize box_to_center_size(const Box3D& b);
Box3D center_size_to_box(const CenterSize& cs);

double iou3d(const Box3D& a, const Box3D& b);

/// Scales box coordinates per axis (x' = x * factor).
Box3D scale_box(const Box3D& b, const Vec3& factor);

struct DetectionCandidate {
  double score = 0.0;
  Box3D box;
  Phase phase = Phase::Unknown;

  friend bool operator==(const DetectionCandidate&, const DetectionCandidate&) = default;
};

/// Greedy NMS by descending score over one pool; equal scores keep input order.
std::vector<DetectionCandidate> nms_merge(const std::vector<DetectionCandidate>& cands, double iou_thresh);

}  // namespace dyntex::detect
