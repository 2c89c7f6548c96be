#include "dyntex/harvest/harvest.hpp"

#include <spdlog/spdlog.h>

#include "dyntex/pts/pts.hpp"

namespace dyntex::harvest {

std::size_t montage_slice(const Volume& mask, const detect::Box3D& box) {
  try {
    return pts::select_key_slice(pts::slice_mask_stack(mask, box));
  } catch (const pts::NoEvidence&) {
    const pts::Footprint f = pts::footprint(box, mask.shape());
    if (f.empty()) return std::min<std::size_t>(static_cast<std::size_t>(std::max(0.0, box.z1)), mask.shape()[2] - 1);
    return (f.z0 + f.z1 - 1) / 2;
  }
}

HarvestResult harvest_run(const io::Manifest& manifest, const std::filesystem::path& root,
                          const std::vector<std::string>& study_ids, const detect::DetectorModel& detector,
                          const HarvestConfig& cfg, SessionStore& store) {
  HarvestResult result;
  for (const auto& id : study_ids) {
    const auto& rec = io::find_study(manifest, id);
    std::array<Volume, 4> phases;
    Volume mask;
    try {
      phases = io::load_phases(root, rec);
      mask = io::load_mask(root, rec);
    } catch (const std::exception& e) {
      spdlog::warn("harvest: skipping study {}: {}", id, e.what());
      result.skipped.push_back({id, e.what()});
      continue;
    }
    const auto dets = detect::detect_study(detector, phases, cfg.topk, cfg.nms_iou);
    std::vector<SessionCandidate> cands;
    for (std::size_t i = 0; i < dets.size(); ++i) cands.push_back({i, dets[i], montage_slice(mask, dets[i].box)});
    QASession s = open_session(id, id, cands);
    if (cands.empty()) {
      store.create(s, nullptr, cfg.window);
    } else {
      const MontageSource src = montage_source(phases, cands, cfg.cell, cfg.cell, cfg.margin);
      store.create(s, &src, cfg.window);
    }
    result.sessions.push_back(std::move(s));
  }
  return result;
}

QASession auto_review(SessionStore& store, const std::string& session_id, const std::vector<detect::Box3D>& primaries,
                      double hit_iou) {
  QASession s = store.load(session_id);
  if (s.status != SessionStatus::Open) return s;
  for (const auto& c : s.candidates) {
    bool hit = false;
    for (const auto& b : primaries) hit = hit || detect::iou3d(c.det.box, b) >= hit_iou;
    store.record(session_id, c.candidate_id, hit ? Verdict::TruePositive : Verdict::FalsePositive);
  }
  return store.finalize(session_id);
}

void write_manual_sidecar(const std::filesystem::path& path, const ManualBoxes& boxes) {
  io::Json j = io::Json::object();
  for (const auto& [id, list] : boxes) {
    io::Json arr = io::Json::array();
    for (const auto& b : list) arr.push_back(io::box_to_json(b));
    j[id] = arr;
  }
  io::write_json(path, j);
}

ManualBoxes read_manual_sidecar(const std::filesystem::path& path) {
  const io::Json j = io::read_json(path);
  if (!j.is_object()) throw io::IoError(path.string() + ": expected an object of study ids");
  ManualBoxes out;
  for (const auto& [id, list] : j.items()) {
    if (!list.is_array()) throw io::IoError(path.string() + ": boxes of " + id + " must be an array");
    auto& dst = out[id];
    for (const auto& b : list) dst.push_back(io::box_from_json(b));
  }
  return out;
}

}  // namespace dyntex::harvest
