#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dyntex/lesion_class.hpp"

namespace dyntex::synth {

enum class Split { Train, Val, Test };

std::string_view split_name(Split s);
Split parse_split(std::string_view s);

using ClassMix = std::array<double, kNumLesionClasses>;

inline constexpr ClassMix kDefaultMix{0.4, 0.2, 0.2, 0.2};

struct CorpusEntry {
  std::string study_id;
  LesionClass label = LesionClass::HCC;
  Split split = Split::Train;
  std::uint64_t seed = 0;
};

/// Largest-remainder apportionment of n over the mix; ties go to the lower class index.
std::array<std::size_t, kNumLesionClasses> class_counts(std::size_t n, const ClassMix& mix);

/// Per-class split sizes (train, val, test) for 60/10/30 with half-up rounding,
/// at least one test study when count >= 5 and one training study when count >= 2.
std::array<std::size_t, 3> split_sizes(std::size_t count);

/// Study list with labels, split tags and per-study seeds; a pure function of its inputs.
std::vector<CorpusEntry> plan_corpus(std::size_t n, const ClassMix& mix, std::uint64_t seed);

}  // namespace dyntex::synth
