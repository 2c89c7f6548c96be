#include "dyntex/harvest/verdict_store.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "dyntex/io/pgm.hpp"

namespace dyntex::harvest {

namespace fs = std::filesystem;
using io::Json;

std::string format_record(const VerdictRecord& r) {
  return std::to_string(r.candidate_id) + "\t" + std::string(verdict_name(r.verdict)) + "\t" + r.timestamp;
}

VerdictRecord parse_record(const std::string& line) {
  std::istringstream ss(line);
  std::string id, verdict, ts;
  if (!std::getline(ss, id, '\t') || !std::getline(ss, verdict, '\t') || !std::getline(ss, ts) || id.empty())
    throw io::IoError("verdict record: expected 3 tab-separated fields: '" + line + "'");
  VerdictRecord r;
  std::size_t used = 0;
  try {
    r.candidate_id = std::stoul(id, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != id.size()) throw io::IoError("verdict record: bad candidate id '" + id + "'");
  const auto v = parse_verdict(verdict);
  if (!v) throw io::IoError("verdict record: unknown verdict '" + verdict + "'");
  r.verdict = *v;
  r.timestamp = ts;
  return r;
}

std::string now_iso8601() {
  const auto now = std::chrono::floor<std::chrono::milliseconds>(std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%S}Z", now);
}

void replay(QASession& s, const std::vector<VerdictRecord>& records) {
  for (const auto& r : records) s.verdicts[s.index_of(r.candidate_id)] = r.verdict;
}

SessionStore::SessionStore(fs::path root) : root_(std::move(root)) {}

fs::path SessionStore::dir(const std::string& id) const {
  if (id.empty() || id.find('/') != std::string::npos || id.find("..") != std::string::npos)
    throw std::invalid_argument("invalid session id '" + id + "'");
  return root_ / id;
}

std::mutex& SessionStore::lock_for(const std::string& id) {
  std::lock_guard<std::mutex> g(map_mutex_);
  auto& m = locks_[id];
  if (!m) m = std::make_unique<std::mutex>();
  return *m;
}

void SessionStore::write_header(const QASession& s, const MontageSource* montage) const {
  Json j;
  j["schema_version"] = kSessionSchemaVersion;
  j["session_id"] = s.session_id;
  j["study_id"] = s.study_id;
  j["status"] = std::string(status_name(s.status));
  Json cands = Json::array();
  for (const auto& c : s.candidates) {
    cands.push_back({{"candidate_id", c.candidate_id},
                     {"phase", std::string(phase_name(c.det.phase))},
                     {"score", c.det.score},
                     {"box", io::box_to_json(c.det.box)},
                     {"key_z", c.key_z}});
  }
  j["candidates"] = cands;
  if (montage) {
    j["montage"] = {{"cell_w", montage->cell_w}, {"cell_h", montage->cell_h}, {"rows", montage->rows}};
  } else if (fs::exists(dir(s.session_id) / "session.json")) {
    const Json old = io::read_json(dir(s.session_id) / "session.json");
    if (old.contains("montage")) j["montage"] = old["montage"];
  }
  io::write_json(dir(s.session_id) / "session.json", j);
}

void SessionStore::create(const QASession& s, const MontageSource* montage, const Window& w) {
  const fs::path d = dir(s.session_id);
  fs::create_directories(d);
  if (montage) {
    std::vector<char> bytes(montage->hu.size() * sizeof(float));
    std::memcpy(bytes.data(), montage->hu.data(), bytes.size());
    io::write_bytes(d / "montage.f32", bytes);
    io::write_pgm(d / "montage.pgm", window_montage(*montage, w).image);
  }
  io::write_text(d / "verdicts.tsv", "");
  write_header(s, montage);
}

std::vector<std::string> SessionStore::list() const {
  std::vector<std::string> ids;
  if (!fs::exists(root_)) return ids;
  for (const auto& e : fs::directory_iterator(root_))
    if (e.is_directory() && fs::exists(e.path() / "session.json")) ids.push_back(e.path().filename().string());
  std::sort(ids.begin(), ids.end());
  return ids;
}

bool SessionStore::contains(const std::string& id) const {
  try {
    return fs::exists(dir(id) / "session.json");
  } catch (const std::invalid_argument&) {
    return false;
  }
}

QASession SessionStore::load(const std::string& id) const {
  const fs::path d = dir(id);
  const Json j = io::read_json(d / "session.json");
  const std::string where = (d / "session.json").string();
  std::vector<SessionCandidate> cands;
  for (const auto& c : io::get_field<Json>(j, "candidates", where)) {
    SessionCandidate sc;
    sc.candidate_id = io::get_field<std::size_t>(c, "candidate_id", where);
    const auto ph = parse_phase(io::get_field<std::string>(c, "phase", where));
    if (!ph) throw io::IoError(where + ": unknown phase");
    sc.det.phase = *ph;
    sc.det.score = io::get_field<double>(c, "score", where);
    sc.det.box = io::box_from_json(io::get_field<Json>(c, "box", where));
    sc.key_z = io::get_field<std::size_t>(c, "key_z", where);
    cands.push_back(sc);
  }
  QASession s = open_session(io::get_field<std::string>(j, "session_id", where),
                             io::get_field<std::string>(j, "study_id", where), std::move(cands));
  const auto status = parse_status(io::get_field<std::string>(j, "status", where));
  if (!status) throw io::IoError(where + ": unknown status");
  std::vector<VerdictRecord> records;
  std::istringstream log(io::read_text(d / "verdicts.tsv"));
  std::string line;
  while (std::getline(log, line))
    if (!line.empty()) records.push_back(parse_record(line));
  replay(s, records);
  s.status = *status;
  return s;
}

std::vector<QASession> SessionStore::load_all() const {
  std::vector<QASession> out;
  for (const auto& id : list()) out.push_back(load(id));
  return out;
}

MontageSource SessionStore::montage(const std::string& id) const {
  const fs::path d = dir(id);
  const Json j = io::read_json(d / "session.json");
  if (!j.contains("montage")) throw io::IoError("session " + id + " has no montage");
  MontageSource src;
  src.cell_w = j["montage"]["cell_w"].get<std::size_t>();
  src.cell_h = j["montage"]["cell_h"].get<std::size_t>();
  src.rows = j["montage"]["rows"].get<std::size_t>();
  for (const auto& c : j["candidates"]) src.candidate_ids.push_back(c["candidate_id"].get<std::size_t>());
  const std::vector<char> bytes = io::read_bytes(d / "montage.f32");
  src.hu.resize(src.width() * src.height());
  if (bytes.size() != src.hu.size() * sizeof(float)) throw io::IoError("session " + id + ": montage raster size mismatch");
  std::memcpy(src.hu.data(), bytes.data(), bytes.size());
  return src;
}

QASession SessionStore::record(const std::string& id, std::size_t candidate_id, Verdict v) {
  std::lock_guard<std::mutex> g(lock_for(id));
  QASession s = load(id);
  const Verdict before = s.verdicts[s.index_of(candidate_id)];
  record_verdict(s, candidate_id, v);
  if (before != v) {
    std::ofstream out(dir(id) / "verdicts.tsv", std::ios::app | std::ios::binary);
    if (!out) throw io::IoError("cannot append to verdicts of session " + id);
    out << format_record({candidate_id, v, now_iso8601()}) << "\n";
  }
  return s;
}

QASession SessionStore::finalize(const std::string& id) {
  std::lock_guard<std::mutex> g(lock_for(id));
  QASession s = load(id);
  harvest::finalize(s);
  write_header(s, nullptr);
  return s;
}

}  // namespace dyntex::harvest
