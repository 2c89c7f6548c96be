#include "dyntex/eval/metrics.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace dyntex::eval {

std::size_t ConfusionTally::n() const {
  std::size_t s = 0;
  for (auto v : matrix) s += v;
  return s;
}

std::size_t ConfusionTally::tp(std::size_t c) const { return count(c, c); }

std::size_t ConfusionTally::fp(std::size_t c) const {
  std::size_t s = 0;
  for (std::size_t t = 0; t < num_classes; ++t)
    if (t != c) s += count(t, c);
  return s;
}

std::size_t ConfusionTally::fn(std::size_t c) const {
  std::size_t s = 0;
  for (std::size_t p = 0; p < num_classes; ++p)
    if (p != c) s += count(c, p);
  return s;
}

std::size_t ConfusionTally::tn(std::size_t c) const { return n() - tp(c) - fp(c) - fn(c); }

ConfusionTally tally(const std::vector<std::size_t>& truth, const std::vector<std::size_t>& pred, std::size_t num_classes) {
  if (truth.size() != pred.size()) throw std::invalid_argument("tally: truth and prediction lengths differ");
  if (num_classes == 0) throw std::invalid_argument("tally: no classes");
  ConfusionTally t{num_classes, std::vector<std::size_t>(num_classes * num_classes, 0)};
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= num_classes || pred[i] >= num_classes) throw std::invalid_argument("tally: class id out of range");
    ++t.matrix[truth[i] * num_classes + pred[i]];
  }
  return t;
}

double f1_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  if (tp + fp == 0 || tp + fn == 0) return 0.0;
  const double p = static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double r = static_cast<double>(tp) / static_cast<double>(tp + fn);
  return p + r > 0 ? 2.0 * p * r / (p + r) : 0.0;
}

double f1_one_vs_all(const ConfusionTally& t, std::size_t c) { return f1_from_counts(t.tp(c), t.fp(c), t.fn(c)); }

double mean_f1(const ConfusionTally& t) {
  double s = 0.0;
  for (std::size_t c = 0; c < t.num_classes; ++c) s += f1_one_vs_all(t, c);
  return s / static_cast<double>(t.num_classes);
}

double accuracy(const ConfusionTally& t) {
  const std::size_t n = t.n();
  if (n == 0) return 0.0;
  std::size_t correct = 0;
  for (std::size_t c = 0; c < t.num_classes; ++c) correct += t.tp(c);
  return static_cast<double>(correct) / static_cast<double>(n);
}

double p1td(const std::vector<StudyDetections>& studies, std::size_t k, double hit_iou) {
  if (studies.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& s : studies) {
    bool hit = false;
    for (std::size_t i = 0; i < std::min(k, s.ranked.size()) && !hit; ++i)
      for (const auto& b : s.primaries) hit = hit || detect::iou3d(s.ranked[i].box, b) >= hit_iou;
    hits += hit;
  }
  return static_cast<double>(hits) / static_cast<double>(studies.size());
}

bool key_slice_hit(const detect::Box3D& c, std::size_t z, const std::vector<detect::Box3D>& primaries) {
  const double zc = static_cast<double>(z) + 0.5;
  for (const auto& b : primaries) {
    if (zc < b.z1 || zc > b.z2) continue;
    const double w = std::min(c.x2, b.x2) - std::max(c.x1, b.x1);
    const double h = std::min(c.y2, b.y2) - std::max(c.y1, b.y1);
    if (w > 0 && h > 0) return true;
  }
  return false;
}

std::string format_report(const std::map<std::string, double>& metrics) {
  std::string out;
  for (const auto& [k, v] : metrics) out += fmt::format("{} {:.6f}\n", k, v);
  return out;
}

}  // namespace dyntex::eval
