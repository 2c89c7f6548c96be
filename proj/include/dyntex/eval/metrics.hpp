#pragma once

#include <map>
#include <string>
#include <vector>

#include "dyntex/detect/box.hpp"

namespace dyntex::eval {

/// Confusion matrix (rows truth, columns prediction) with one-vs-all counts.
struct ConfusionTally {
  std::size_t num_classes = 0;
  std::vector<std::size_t> matrix;

  std::size_t n() const;
  std::size_t count(std::size_t truth, std::size_t pred) const { return matrix[truth * num_classes + pred]; }
  std::size_t tp(std::size_t c) const;
  std::size_t fp(std::size_t c) const;
  std::size_t fn(std::size_t c) const;
  std::size_t tn(std::size_t c) const;
};

ConfusionTally tally(const std::vector<std::size_t>& truth, const std::vector<std::size_t>& pred, std::size_t num_classes);

/// F1 of class c against the rest; 0 when precision or recall has an empty denominator.
double f1_one_vs_all(const ConfusionTally& t, std::size_t c);
double f1_from_counts(std::size_t tp, std::size_t fp, std::size_t fn);
double mean_f1(const ConfusionTally& t);
double accuracy(const ConfusionTally& t);

struct StudyDetections {
  std::vector<detect::Box3D> primaries;
  std::vector<detect::DetectionCandidate> ranked;  // descending score
};

/// Fraction of studies where one of the top-k candidates reaches IoU >= hit_iou with a primary box.
double p1td(const std::vector<StudyDetections>& studies, std::size_t k, double hit_iou);

/// The chosen slice z of a candidate overlaps a primary box: z lies in the
/// box's slice range and the xy rectangles intersect with positive area.
bool key_slice_hit(const detect::Box3D& candidate, std::size_t z, const std::vector<detect::Box3D>& primaries);

/// Flat `key value` lines, keys sorted.
std::string format_report(const std::map<std::string, double>& metrics);

}  // namespace dyntex::eval
