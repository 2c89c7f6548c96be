#pragma once

#include <map>
#include <string>
#include <vector>

#include "dyntex/detect/detector.hpp"
#include "dyntex/harvest/labor.hpp"
#include "dyntex/harvest/montage.hpp"
#include "dyntex/harvest/verdict_store.hpp"
#include "dyntex/io/manifest.hpp"

namespace dyntex::harvest {

struct HarvestConfig {
  std::size_t topk = 10;
  double nms_iou = 0.3;
  double margin = 0.25;
  std::size_t cell = 64;
  Window window;
};

struct SkippedStudy {
  std::string study_id;
  std::string reason;
};

struct HarvestResult {
  std::vector<QASession> sessions;
  std::vector<SkippedStudy> skipped;
};

/// Key slice for a montage row: largest mask area inside the footprint,
/// or the box's middle slice when the mask shows nothing there.
std::size_t montage_slice(const Volume& mask, const detect::Box3D& box);

/// Detects per phase, pools and merges, renders the montage and persists
/// one session per study (id = study id). Studies whose volumes cannot be
/// read are skipped with the reason logged.
HarvestResult harvest_run(const io::Manifest& manifest, const std::filesystem::path& root,
                          const std::vector<std::string>& study_ids, const detect::DetectorModel& detector,
                          const HarvestConfig& cfg, SessionStore& store);

/// Stand-in reviewer: a candidate is a true positive when its IoU with a
/// primary box reaches `hit_iou`. Records every verdict and finalizes.
QASession auto_review(SessionStore& store, const std::string& session_id, const std::vector<detect::Box3D>& primaries,
                      double hit_iou);

/// Manual annotations for needs_manual studies: {study_id: [[x1,y1,z1,x2,y2,z2], ...]}.
using ManualBoxes = std::map<std::string, std::vector<detect::Box3D>>;
void write_manual_sidecar(const std::filesystem::path& path, const ManualBoxes& boxes);
ManualBoxes read_manual_sidecar(const std::filesystem::path& path);

}  // namespace dyntex::harvest
