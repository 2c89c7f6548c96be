#pragma once

// Registry of every hand-written backward pass, each checked against
// 64-bit central differences on seeded random instances.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dyntex::cli {

struct GradCheckOptions {
  std::size_t instances = 20;
  std::uint64_t seed = 1;
  double tolerance = 1e-4;
  std::optional<double> step;  // overrides each check's own step
  /// Name of a registered check whose analytic gradient is scaled by 2.
  std::optional<std::string> plant_bug;
};

struct GradCheckOutcome {
  std::string name;
  std::size_t instances = 0;
  double max_rel_error = 0.0;
  bool passed = false;
  double seconds = 0.0;
};

std::vector<std::string> gradcheck_names();

/// Throws std::invalid_argument for an unknown plant_bug name.
std::vector<GradCheckOutcome> run_gradcheck_suite(const GradCheckOptions& opts);

}  // namespace dyntex::cli
