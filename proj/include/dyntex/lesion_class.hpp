#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace dyntex {

enum class LesionClass { HCC = 0, ICC = 1, Benign = 2, Metastasis = 3 };

inline constexpr std::size_t kNumLesionClasses = 4;
inline constexpr std::array<LesionClass, 4> kLesionClasses{LesionClass::HCC, LesionClass::ICC, LesionClass::Benign,
                                                           LesionClass::Metastasis};

inline std::string_view class_name(LesionClass c) {
  switch (c) {
    case LesionClass::HCC: return "HCC";
    case LesionClass::ICC: return "ICC";
    case LesionClass::Benign: return "Benign";
    case LesionClass::Metastasis: return "Metastasis";
  }
  return "?";
}

inline std::optional<LesionClass> parse_class(std::string_view s) {
  for (auto c : kLesionClasses)
    if (class_name(c) == s) return c;
  return std::nullopt;
}

}  // namespace dyntex
