#include "dyntex/harvest/labor.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

namespace dyntex::harvest {

LaborReport labor_report(std::size_t n_studies, std::size_t n_manual, const LaborConfig& cfg) {
  if (n_manual > n_studies) throw std::invalid_argument("labor_report: more manual studies than studies");
  LaborReport r;
  r.n_studies = n_studies;
  r.n_manual_studies = n_manual;
  r.n_qa_minutes = static_cast<double>(n_studies) * cfg.qa_minutes;
  r.n_manual_minutes = static_cast<double>(n_manual) * cfg.manual_minutes;
  r.total_minutes = r.n_qa_minutes + r.n_manual_minutes;
  r.baseline_minutes = static_cast<double>(n_studies) * cfg.manual_minutes;
  if (r.baseline_minutes <= 0.0) return r;
  const double raw = 1.0 - r.total_minutes / r.baseline_minutes;
  r.savings_fraction = std::clamp(raw, 0.0, 1.0);
  if (raw != r.savings_fraction) spdlog::warn("labor savings {:.4f} outside [0,1], clamped", raw);
  return r;
}

LaborReport labor_report(const std::vector<QASession>& sessions, const LaborConfig& cfg) {
  std::size_t manual = 0;
  for (const auto& s : sessions) {
    if (s.status == SessionStatus::Open) throw SessionConflict("session " + s.session_id + " is still open");
    manual += s.status == SessionStatus::NeedsManual;
  }
  return labor_report(sessions.size(), manual, cfg);
}

}  // namespace dyntex::harvest
