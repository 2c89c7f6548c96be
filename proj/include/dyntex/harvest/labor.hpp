#pragma once

#include <vector>

#include "dyntex/harvest/session.hpp"

namespace dyntex::harvest {

struct LaborConfig {
  double qa_minutes = 1.0;       // per study
  double manual_minutes = 15.0;  // per study annotated from scratch
};

struct LaborReport {
  std::size_t n_studies = 0;
  double n_qa_minutes = 0.0;
  std::size_t n_manual_studies = 0;
  double n_manual_minutes = 0.0;
  double total_minutes = 0.0;
  double baseline_minutes = 0.0;
  double savings_fraction = 0.0;  // 1 - total/baseline, clamped to [0,1]
};

LaborReport labor_report(std::size_t n_studies, std::size_t n_manual, const LaborConfig& cfg = {});
/// Throws SessionConflict if any session is still open.
LaborReport labor_report(const std::vector<QASession>& sessions, const LaborConfig& cfg = {});

}  // namespace dyntex::harvest
