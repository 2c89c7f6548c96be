#include "dyntex/io/candidates.hpp"

#include <sstream>

#include <fmt/format.h>

namespace dyntex::io {
namespace {

constexpr const char* kHeader = "study_id,phase,score,x1,y1,z1,x2,y2,z2";

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, const std::string& where) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw IoError(where + ": not a number: '" + s + "'");
  return v;
}

}  // namespace

std::string format_candidates(const std::string& study_id, const std::vector<detect::DetectionCandidate>& cands) {
  std::string out = std::string(kHeader) + "\n";
  for (const auto& c : cands) {
    const auto& b = c.box;
    out += fmt::format("{},{},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g}\n", study_id, phase_name(c.phase),
                       c.score, b.x1, b.y1, b.z1, b.x2, b.y2, b.z2);
  }
  return out;
}

std::vector<CandidateRecord> parse_candidates(const std::string& text, const std::string& where) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw IoError(where + ": missing candidate header");
  std::vector<CandidateRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string at = where + ":" + std::to_string(lineno);
    const auto f = split_fields(line);
    if (f.size() != 9) throw IoError(at + ": expected 9 fields, got " + std::to_string(f.size()));
    CandidateRecord r;
    r.study_id = f[0];
    const auto ph = parse_phase(f[1]);
    if (!ph) throw IoError(at + ": unknown phase '" + f[1] + "'");
    r.cand.phase = *ph;
    r.cand.score = parse_number(f[2], at);
    r.cand.box = {parse_number(f[3], at), parse_number(f[4], at), parse_number(f[5], at),
                  parse_number(f[6], at), parse_number(f[7], at), parse_number(f[8], at)};
    if (!r.cand.box.valid()) throw IoError(at + ": invalid box");
    out.push_back(std::move(r));
  }
  return out;
}

void write_candidates(const fs::path& path, const std::string& study_id,
                      const std::vector<detect::DetectionCandidate>& cands) {
  write_text(path, format_candidates(study_id, cands));
}

std::vector<detect::DetectionCandidate> read_candidates(const fs::path& path, const std::string& study_id) {
  std::vector<detect::DetectionCandidate> out;
  for (auto& r : parse_candidates(read_text(path), path.string())) {
    if (r.study_id != study_id) throw IoError(path.string() + ": record for study " + r.study_id + ", expected " + study_id);
    out.push_back(r.cand);
  }
  return out;
}

}  // namespace dyntex::io
