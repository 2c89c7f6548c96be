#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "dyntex/harvest/montage.hpp"
#include "dyntex/harvest/session.hpp"
#include "dyntex/io/json_util.hpp"

namespace dyntex::harvest {

inline constexpr int kSessionSchemaVersion = 1;

struct VerdictRecord {
  std::size_t candidate_id = 0;
  Verdict verdict = Verdict::Unreviewed;
  std::string timestamp;  // ISO 8601, UTC
};

/// `candidate_id<TAB>verdict<TAB>timestamp`.
std::string format_record(const VerdictRecord& r);
VerdictRecord parse_record(const std::string& line);

std::string now_iso8601();

/// Replays records onto a freshly opened session.
void replay(QASession& s, const std::vector<VerdictRecord>& records);

/// Sessions on disk, one directory each: session.json (candidates, status),
/// verdicts.tsv (append-only), montage.f32 (HU raster) and montage.pgm
/// (default window). Writes to one session are serialised.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  void create(const QASession& s, const MontageSource* montage, const Window& w);
  std::vector<std::string> list() const;
  bool contains(const std::string& id) const;
  QASession load(const std::string& id) const;
  std::vector<QASession> load_all() const;
  MontageSource montage(const std::string& id) const;

  QASession record(const std::string& id, std::size_t candidate_id, Verdict v);
  QASession finalize(const std::string& id);

 private:
  std::filesystem::path dir(const std::string& id) const;
  std::mutex& lock_for(const std::string& id);
  void write_header(const QASession& s, const MontageSource* montage) const;

  std::filesystem::path root_;
  std::mutex map_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> locks_;
};

}  // namespace dyntex::harvest
