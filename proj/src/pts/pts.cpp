#include "dyntex/pts/pts.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dyntex::pts {
namespace {

std::size_t clip_floor(double v, std::size_t n) {
  return static_cast<std::size_t>(std::clamp(std::floor(v), 0.0, static_cast<double>(n)));
}
std::size_t clip_ceil(double v, std::size_t n) {
  return static_cast<std::size_t>(std::clamp(std::ceil(v), 0.0, static_cast<double>(n)));
}

}  // namespace

Footprint footprint(const detect::Box3D& b, const Dims3& d) {
  return {clip_floor(b.x1, d[0]), clip_ceil(b.x2, d[0]), clip_floor(b.y1, d[1]),
          clip_ceil(b.y2, d[1]), clip_floor(b.z1, d[2]), clip_ceil(b.z2, d[2])};
}

SliceMaskStack slice_mask_stack(const Volume& mask, const detect::Box3D& box) {
  const Footprint f = footprint(box, mask.shape());
  SliceMaskStack s;
  s.z_begin = f.z0;
  if (f.empty()) return s;
  for (std::size_t z = f.z0; z < f.z1; ++z) {
    std::size_t area = 0;
    for (std::size_t y = f.y0; y < f.y1; ++y)
      for (std::size_t x = f.x0; x < f.x1; ++x) area += mask.at(x, y, z) != 0.0f;
    s.per_slice_area.push_back(area);
  }
  return s;
}

std::size_t select_key_slice(const SliceMaskStack& stack) {
  const auto& a = stack.per_slice_area;
  if (a.empty()) throw NoEvidence("candidate spans no slice");
  const auto it = std::max_element(a.begin(), a.end());  // first maximum
  if (*it == 0) throw NoEvidence("no lesion-mask pixels inside the candidate");
  return stack.z_begin + static_cast<std::size_t>(it - a.begin());
}

std::vector<std::size_t> top_area_slices(const SliceMaskStack& stack, std::size_t k) {
  std::vector<std::size_t> idx(stack.per_slice_area.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return stack.per_slice_area[a] > stack.per_slice_area[b]; });
  std::vector<std::size_t> out;
  for (std::size_t i : idx) {
    if (out.size() == k || stack.per_slice_area[i] == 0) break;
    out.push_back(stack.z_begin + i);
  }
  return out;
}

SliceCrop crop_slice(const std::array<Volume, 4>& phases, const Volume& mask, const detect::Box3D& box, std::size_t z,
                     double margin) {
  const Dims3& d = mask.shape();
  if (z >= d[2]) throw std::invalid_argument("crop_slice: slice " + std::to_string(z) + " outside the volume");
  for (const auto& p : phases) {
    if (p.shape() != d) throw std::invalid_argument("crop_slice: phase volumes and mask must share a grid");
  }
  const double mx = margin * (box.x2 - box.x1), my = margin * (box.y2 - box.y1);
  std::size_t x0 = clip_floor(box.x1 - mx, d[0]), x1 = clip_ceil(box.x2 + mx, d[0]);
  std::size_t y0 = clip_floor(box.y1 - my, d[1]), y1 = clip_ceil(box.y2 + my, d[1]);
  // Keep at least a 4x4 window so downstream extractors always see pixels.
  auto widen = [](std::size_t& lo, std::size_t& hi, std::size_t n) {
    while (hi - lo < std::min<std::size_t>(4, n)) {
      if (hi < n) ++hi;
      if (hi - lo < std::min<std::size_t>(4, n) && lo > 0) --lo;
    }
  };
  if (x1 <= x0) x1 = std::min(x0 + 1, d[0]), x0 = x1 - 1;
  if (y1 <= y0) y1 = std::min(y0 + 1, d[1]), y0 = y1 - 1;
  widen(x0, x1, d[0]);
  widen(y0, y1, d[1]);

  const std::size_t H = y1 - y0, W = x1 - x0;
  const Footprint f = footprint(box, d);
  SliceCrop c;
  c.x0 = x0;
  c.y0 = y0;
  c.z = z;
  for (std::size_t p = 0; p < 4; ++p) c.phases[p] = Tensor64({H, W});
  c.box_mask = Tensor64({H, W}, 0.0);
  c.seg_mask = Tensor64({H, W}, 0.0);
  for (std::size_t y = 0; y < H; ++y)
    for (std::size_t x = 0; x < W; ++x) {
      const std::size_t gx = x0 + x, gy = y0 + y;
      for (std::size_t p = 0; p < 4; ++p) c.phases[p](y, x) = phases[p].at(gx, gy, z);
      c.seg_mask(y, x) = mask.at(gx, gy, z) != 0.0f ? 1.0 : 0.0;
      c.box_mask(y, x) = (gx >= f.x0 && gx < f.x1 && gy >= f.y0 && gy < f.y1) ? 1.0 : 0.0;
    }
  return c;
}

std::optional<std::size_t> filter_primary(const std::vector<PrimaryDecision>& decisions) {
  std::optional<std::size_t> best;
  double best_score = 0.0;
  for (const auto& d : decisions) {
    if (!d.is_primary) continue;
    if (!best || d.detection_score > best_score) {
      best = d.candidate_id;
      best_score = d.detection_score;
    }
  }
  return best;
}

std::string_view status_name(PtsStatus s) {
  switch (s) {
    case PtsStatus::Selected: return "selected";
    case PtsStatus::NoPrimary: return "no_primary";
    case PtsStatus::NoEvidence: return "no_evidence";
    case PtsStatus::NoDetection: return "no_detection";
  }
  return "no_detection";
}

PtsResult pts_pipeline(const std::array<Volume, 4>& phases, const std::vector<detect::DetectionCandidate>& candidates,
                       const Volume& mask, const SliceClassifier& classifier, const PtsConfig& cfg) {
  PtsResult r;
  if (candidates.empty()) return r;
  std::vector<KeySlice> slices;
  for (std::size_t id = 0; id < candidates.size(); ++id) {
    const auto& c = candidates[id];
    std::size_t z = 0;
    try {
      z = select_key_slice(slice_mask_stack(mask, c.box));
    } catch (const NoEvidence&) {
      r.no_evidence.push_back(id);
      continue;
    }
    KeySlice ks{id, z, crop_slice(phases, mask, c.box, z, cfg.margin)};
    const double score = classifier(ks);
    r.decisions.push_back({id, score >= cfg.threshold, score, c.score});
    slices.push_back(std::move(ks));
  }
  if (r.decisions.empty()) {
    r.status = PtsStatus::NoEvidence;
    return r;
  }
  const auto chosen = filter_primary(r.decisions);
  if (!chosen) {
    r.status = PtsStatus::NoPrimary;
    return r;
  }
  r.status = PtsStatus::Selected;
  for (auto& ks : slices)
    if (ks.candidate_id == *chosen) r.chosen = std::move(ks);
  return r;
}

}  // namespace dyntex::pts
