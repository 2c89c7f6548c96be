#pragma once

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "dyntex/detect/box.hpp"
#include "dyntex/numerics/tensor.hpp"
#include "dyntex/volume.hpp"

namespace dyntex::pts {

/// Integer voxel footprint [x0,x1) x [y0,y1) x [z0,z1) of a box, clipped to the volume.
struct Footprint {
  std::size_t x0 = 0, x1 = 0, y0 = 0, y1 = 0, z0 = 0, z1 = 0;
  bool empty() const { return x0 >= x1 || y0 >= y1 || z0 >= z1; }
};
Footprint footprint(const detect::Box3D& box, const Dims3& dims);

/// Lesion-mask pixel counts per slice of the candidate's z-range, restricted to its xy footprint.
struct SliceMaskStack {
  std::size_t z_begin = 0;
  std::vector<std::size_t> per_slice_area;
};
SliceMaskStack slice_mask_stack(const Volume& mask, const detect::Box3D& box);

class NoEvidence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Absolute z of the largest-area slice; ties go to the smallest z.
/// Throws NoEvidence when every area is zero or the stack is empty.
std::size_t select_key_slice(const SliceMaskStack& stack);

/// Up to k slices by decreasing area (ties by z), zero-area slices excluded.
std::vector<std::size_t> top_area_slices(const SliceMaskStack& stack, std::size_t k);

/// Native-resolution crops of one slice around a box, widened by `margin`
/// times the box extent on each side and clipped to the volume.
struct SliceCrop {
  std::array<Tensor64, 4> phases;  // [H,W] intensities
  Tensor64 box_mask;               // [H,W] 1 inside the box footprint
  Tensor64 seg_mask;               // [H,W] lesion mask
  std::size_t x0 = 0, y0 = 0, z = 0;
};
SliceCrop crop_slice(const std::array<Volume, 4>& phases, const Volume& mask, const detect::Box3D& box, std::size_t z,
                     double margin);

struct KeySlice {
  std::size_t candidate_id = 0;
  std::size_t z_index = 0;
  SliceCrop roi;
};

struct PrimaryDecision {
  std::size_t candidate_id = 0;
  bool is_primary = false;
  double classifier_score = 0.0;
  double detection_score = 0.0;
};

/// Primary candidate with the largest detection score, if any.
std::optional<std::size_t> filter_primary(const std::vector<PrimaryDecision>& decisions);

enum class PtsStatus { Selected, NoPrimary, NoEvidence, NoDetection };
std::string_view status_name(PtsStatus s);

struct PtsConfig {
  double threshold = 0.5;
  double margin = 0.25;
};

struct PtsResult {
  PtsStatus status = PtsStatus::NoDetection;
  std::optional<KeySlice> chosen;            // set only when Selected
  std::vector<PrimaryDecision> decisions;    // candidates with evidence
  std::vector<std::size_t> no_evidence;      // candidate ids excluded for lack of mask evidence
};

/// Probability that a key slice shows the primary tumour.
using SliceClassifier = std::function<double(const KeySlice&)>;

PtsResult pts_pipeline(const std::array<Volume, 4>& phases, const std::vector<detect::DetectionCandidate>& candidates,
                       const Volume& mask, const SliceClassifier& classifier, const PtsConfig& cfg);

}  // namespace dyntex::pts
