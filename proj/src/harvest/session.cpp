#include "dyntex/harvest/session.hpp"

#include <algorithm>

namespace dyntex::harvest {

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Unreviewed: return "unreviewed";
    case Verdict::TruePositive: return "true_positive";
    case Verdict::FalsePositive: return "false_positive";
  }
  return "?";
}

std::optional<Verdict> parse_verdict(std::string_view s) {
  for (auto v : {Verdict::Unreviewed, Verdict::TruePositive, Verdict::FalsePositive})
    if (verdict_name(v) == s) return v;
  return std::nullopt;
}

std::string_view status_name(SessionStatus s) {
  switch (s) {
    case SessionStatus::Open: return "open";
    case SessionStatus::Finalized: return "finalized";
    case SessionStatus::NeedsManual: return "needs_manual";
  }
  return "?";
}

std::optional<SessionStatus> parse_status(std::string_view s) {
  for (auto v : {SessionStatus::Open, SessionStatus::Finalized, SessionStatus::NeedsManual})
    if (status_name(v) == s) return v;
  return std::nullopt;
}

std::size_t QASession::n_reviewed() const {
  return static_cast<std::size_t>(
      std::count_if(verdicts.begin(), verdicts.end(), [](Verdict v) { return v != Verdict::Unreviewed; }));
}

std::size_t QASession::n_true_positive() const {
  return static_cast<std::size_t>(std::count(verdicts.begin(), verdicts.end(), Verdict::TruePositive));
}

std::size_t QASession::index_of(std::size_t candidate_id) const {
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (candidates[i].candidate_id == candidate_id) return i;
  throw UnknownCandidate("session " + session_id + " has no candidate " + std::to_string(candidate_id));
}

QASession open_session(std::string session_id, std::string study_id, std::vector<SessionCandidate> candidates) {
  QASession s;
  s.session_id = std::move(session_id);
  s.study_id = std::move(study_id);
  s.candidates = std::move(candidates);
  s.verdicts.assign(s.candidates.size(), Verdict::Unreviewed);
  s.status = s.candidates.empty() ? SessionStatus::NeedsManual : SessionStatus::Open;
  return s;
}

void record_verdict(QASession& s, std::size_t candidate_id, Verdict v) {
  if (s.status != SessionStatus::Open)
    throw SessionConflict("session " + s.session_id + " is " + std::string(status_name(s.status)));
  s.verdicts[s.index_of(candidate_id)] = v;
}

void finalize(QASession& s) {
  if (s.status != SessionStatus::Open)
    throw SessionConflict("session " + s.session_id + " is " + std::string(status_name(s.status)));
  const std::size_t pending = s.candidates.size() - s.n_reviewed();
  if (pending) {
    throw SessionConflict("session " + s.session_id + " has " + std::to_string(pending) + " unreviewed candidates");
  }
  s.status = s.n_true_positive() ? SessionStatus::Finalized : SessionStatus::NeedsManual;
}

}  // namespace dyntex::harvest
