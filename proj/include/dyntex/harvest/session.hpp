#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dyntex/detect/box.hpp"

namespace dyntex::harvest {

enum class Verdict { Unreviewed, TruePositive, FalsePositive };
std::string_view verdict_name(Verdict v);
std::optional<Verdict> parse_verdict(std::string_view s);

enum class SessionStatus { Open, Finalized, NeedsManual };
std::string_view status_name(SessionStatus s);
std::optional<SessionStatus> parse_status(std::string_view s);

/// Verdict or finalize request against a session that is no longer open,
/// or a finalize request while candidates are still unreviewed.
class SessionConflict : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class UnknownCandidate : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SessionCandidate {
  std::size_t candidate_id = 0;
  detect::DetectionCandidate det;
  std::size_t key_z = 0;  // slice shown in the montage
};

struct QASession {
  std::string session_id;
  std::string study_id;
  std::vector<SessionCandidate> candidates;
  std::vector<Verdict> verdicts;  // parallel to candidates
  SessionStatus status = SessionStatus::Open;

  std::size_t n_reviewed() const;
  std::size_t n_true_positive() const;
  std::size_t index_of(std::size_t candidate_id) const;  // throws UnknownCandidate
};

/// New session, all unreviewed. No candidates: needs_manual from the start.
QASession open_session(std::string session_id, std::string study_id, std::vector<SessionCandidate> candidates);

/// Idempotent per (candidate, verdict).
void record_verdict(QASession& s, std::size_t candidate_id, Verdict v);

/// open -> finalized with at least one true positive, otherwise needs_manual.
void finalize(QASession& s);

}  // namespace dyntex::harvest
