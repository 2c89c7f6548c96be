#include "dyntex/volume.hpp"

#include <stdexcept>

namespace dyntex {

std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::NC: return "NC";
    case Phase::A: return "A";
    case Phase::V: return "V";
    case Phase::D: return "D";
    case Phase::Unknown: break;
  }
  return "UNKNOWN";
}

std::optional<Phase> parse_phase(std::string_view s) {
  if (s == "NC") return Phase::NC;
  if (s == "A") return Phase::A;
  if (s == "V") return Phase::V;
  if (s == "D") return Phase::D;
  if (s == "UNKNOWN") return Phase::Unknown;
  return std::nullopt;
}

std::size_t phase_index(Phase p) {
  switch (p) {
    case Phase::NC: return 0;
    case Phase::A: return 1;
    case Phase::V: return 2;
    case Phase::D: return 3;
    case Phase::Unknown: break;
  }
  throw std::invalid_argument("phase_index: UNKNOWN phase has no index");
}

}  // namespace dyntex
