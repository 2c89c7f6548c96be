#pragma once

#include <string>
#include <vector>

#include "dyntex/detect/box.hpp"
#include "dyntex/io/json_util.hpp"

namespace dyntex::io {

// CSV with header `study_id,phase,score,x1,y1,z1,x2,y2,z2`, ranked by score.

struct CandidateRecord {
  std::string study_id;
  detect::DetectionCandidate cand;
};

std::string format_candidates(const std::string& study_id, const std::vector<detect::DetectionCandidate>& cands);
std::vector<CandidateRecord> parse_candidates(const std::string& text, const std::string& where);

void write_candidates(const fs::path& path, const std::string& study_id,
                      const std::vector<detect::DetectionCandidate>& cands);
std::vector<detect::DetectionCandidate> read_candidates(const fs::path& path, const std::string& study_id);

}  // namespace dyntex::io
