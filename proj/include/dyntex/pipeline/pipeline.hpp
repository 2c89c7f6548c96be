#pragma once

// Orchestration shared by the command line and the acceptance suite.

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dyntex/classify/train.hpp"
#include "dyntex/detect/detector.hpp"
#include "dyntex/harvest/verdict_store.hpp"
#include "dyntex/io/config.hpp"
#include "dyntex/io/manifest.hpp"
#include "dyntex/io/models.hpp"
#include "dyntex/pts/pts.hpp"

namespace dyntex::pipeline {

namespace fs = std::filesystem;

/// Renders every study of plan_corpus(n, mix, seed) under `out` and writes
/// `out/manifest.json`. Studies are generated in parallel; files are disjoint.
io::Manifest generate_corpus(const fs::path& out, std::size_t n, const synth::ClassMix& mix, std::uint64_t seed);

/// In-memory variant of one generated study, for callers that skip the disk.
struct MemoryStudy {
  synth::CorpusEntry entry;
  synth::Study study;
};
std::vector<MemoryStudy> generate_in_memory(std::size_t n, const synth::ClassMix& mix, std::uint64_t seed);

std::vector<std::string> studies_in(const io::Manifest& m, std::optional<synth::Split> split);

struct StudyData {
  std::array<Volume, 4> phases;
  Volume mask;
};
StudyData load_study(const fs::path& root, const io::StudyRecord& rec);

detect::DetectorModel train_detector(const io::Manifest& m, const fs::path& root, synth::Split split,
                                     const io::Config& cfg);

/// Classifier inputs for one region: the top-`slices` mask-area slices of
/// `box` (at least its middle slice when the mask is empty there), cropped
/// with the lesion classifier margin.
std::vector<classify::ClassifierInput> region_inputs(const StudyData& d, const detect::Box3D& box, std::size_t slices,
                                                     classify::InputMode mode, const io::Config& cfg);

/// Four-class samples from the ground-truth primary boxes of the given studies.
std::vector<classify::LabeledInput> lesion_samples(const io::Manifest& m, const fs::path& root,
                                                   const std::vector<std::string>& ids, std::size_t slices,
                                                   classify::InputMode mode, const io::Config& cfg);
std::vector<classify::LabeledInput> lesion_samples(const std::vector<MemoryStudy>& studies, synth::Split split,
                                                   std::size_t slices, classify::InputMode mode, const io::Config& cfg);

/// Key-slice filter samples from reviewed sessions: label 1 for true
/// positives, 0 for false positives; candidates without mask evidence are skipped.
std::vector<classify::LabeledInput> ksf_samples(const io::Manifest& m, const fs::path& root,
                                                const std::vector<harvest::QASession>& sessions,
                                                const io::Config& cfg);

/// `members` models; member i trains with seed derive_seed(cfg.seed, i) for i > 0, member 0 with cfg.seed.
std::vector<io::ClassifierBundle> train_classifiers(const std::vector<classify::LabeledInput>& samples,
                                                    std::size_t num_classes, classify::InputMode mode,
                                                    const std::string& task, const io::Config& cfg,
                                                    std::size_t members, std::vector<double> class_weights);

/// Per-member probabilities for one ROI and the ensemble vote.
struct Prediction {
  std::vector<Tensor64> member_probs;
  std::size_t label = 0;
};
Prediction predict(const std::vector<io::ClassifierBundle>& members, const StudyData& d, const detect::Box3D& box,
                   std::size_t z);

/// Primary-tumour selection with a fallback so that every study yields one
/// region: if no candidate is classified primary, the highest-scoring
/// candidate with mask evidence; if none has evidence, the top candidate at
/// its middle slice; with no detection at all, the whole volume at its middle slice.
struct PtsOutcome {
  pts::PtsStatus status = pts::PtsStatus::NoDetection;
  bool fallback = false;
  std::optional<std::size_t> candidate_id;
  detect::Box3D box;
  std::size_t z = 0;
  std::vector<pts::PrimaryDecision> decisions;
};
PtsOutcome run_pts(const StudyData& d, const std::vector<detect::DetectionCandidate>& cands,
                   const std::vector<io::ClassifierBundle>& ksf, const io::Config& cfg);

}  // namespace dyntex::pipeline
