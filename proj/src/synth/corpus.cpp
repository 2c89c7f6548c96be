#include "dyntex/synth/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "dyntex/numerics/rng.hpp"

namespace dyntex::synth {

std::string_view split_name(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "train";
}

Split parse_split(std::string_view s) {
  if (s == "train") return Split::Train;
  if (s == "val") return Split::Val;
  if (s == "test") return Split::Test;
  throw std::invalid_argument("unknown split '" + std::string(s) + "'");
}

std::array<std::size_t, kNumLesionClasses> class_counts(std::size_t n, const ClassMix& mix) {
  double total = 0.0;
  for (double m : mix) {
    if (!(m >= 0.0) || !std::isfinite(m)) throw std::invalid_argument("class mix entries must be finite and >= 0");
    total += m;
  }
  if (std::abs(total - 1.0) > 1e-6) throw std::invalid_argument("class mix must sum to 1");
  std::array<std::size_t, kNumLesionClasses> counts{};
  std::array<double, kNumLesionClasses> rem{};
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < kNumLesionClasses; ++c) {
    const double quota = n * mix[c];
    counts[c] = static_cast<std::size_t>(std::floor(quota + 1e-9));
    rem[c] = quota - counts[c];
    assigned += counts[c];
  }
  std::array<std::size_t, kNumLesionClasses> order{};
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b] + 1e-12; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++counts[order[i % order.size()]];
  return counts;
}

std::array<std::size_t, 3> split_sizes(std::size_t count) {
  auto half_up = [](double v) { return static_cast<std::size_t>(std::floor(v + 0.5)); };
  std::size_t test = half_up(0.3 * count);
  std::size_t val = half_up(0.1 * count);
  if (count >= 5) test = std::max<std::size_t>(test, 1);
  test = std::min(test, count);
  val = std::min(val, count - test);
  std::size_t train = count - test - val;
  if (count >= 2 && train == 0) {
    if (val > 0) {
      --val;
    } else {
      --test;
    }
    train = 1;
  }
  return {train, val, test};
}

std::vector<CorpusEntry> plan_corpus(std::size_t n, const ClassMix& mix, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("corpus needs at least one study");
  const auto counts = class_counts(n, mix);
  std::vector<CorpusEntry> entries;
  for (std::size_t c = 0; c < kNumLesionClasses; ++c) {
    const auto sizes = split_sizes(counts[c]);
    std::vector<Split> tags;
    tags.insert(tags.end(), sizes[0], Split::Train);
    tags.insert(tags.end(), sizes[1], Split::Val);
    tags.insert(tags.end(), sizes[2], Split::Test);
    for (Split s : tags) entries.push_back({"", static_cast<LesionClass>(c), s, 0});
  }
  // Interleave classes so study ids carry no label information.
  Rng rng(derive_seed(seed, 0));
  rng.shuffle(entries.begin(), entries.end());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "s%04zu", i);
    entries[i].study_id = id;
    entries[i].seed = derive_seed(seed, 1000 + i);
  }
  return entries;
}

}  // namespace dyntex::synth
