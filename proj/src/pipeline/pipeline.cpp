#include "dyntex/pipeline/pipeline.hpp"

#include <algorithm>

#include "dyntex/classify/ensemble.hpp"
#include "dyntex/classify/roi.hpp"
#include "dyntex/harvest/harvest.hpp"
#include "dyntex/io/volume_io.hpp"
#include "dyntex/numerics/rng.hpp"

namespace dyntex::pipeline {

namespace {

io::StudyRecord record_for(const synth::CorpusEntry& e, const synth::Study& st) {
  io::StudyRecord r;
  r.study_id = e.study_id;
  r.label = e.label;
  r.split = e.split;
  r.seed = e.seed;
  const std::string dir = "studies/" + e.study_id + "/";
  for (std::size_t p = 0; p < 4; ++p) r.phase_files[p] = dir + std::string(phase_name(kContrastPhases[p])) + ".json";
  r.mask_file = dir + "mask.json";
  r.lesions = st.lesions;
  return r;
}

std::size_t middle_slice(const Volume& ref, const detect::Box3D& box) {
  return harvest::montage_slice(Volume(ref.shape(), ref.spacing_mm, Phase::Unknown, 0.0f), box);
}

StudyData as_data(const synth::Study& st) { return {st.phases, st.lesion_mask}; }

std::vector<classify::LabeledInput> label_all(std::vector<classify::ClassifierInput> inputs, std::size_t label) {
  std::vector<classify::LabeledInput> out;
  for (auto& in : inputs) out.push_back({std::move(in), label});
  return out;
}

}  // namespace

io::Manifest generate_corpus(const fs::path& out, std::size_t n, const synth::ClassMix& mix, std::uint64_t seed) {
  const auto plan = synth::plan_corpus(n, mix, seed);
  io::Manifest m;
  m.seed = seed;
  m.mix = mix;
  m.studies.resize(plan.size());
  std::vector<std::string> errors(plan.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < plan.size(); ++i) {
    try {
      const auto& e = plan[i];
      const synth::Study st = synth::generate_study(synth::sample_study_spec(e.seed, e.label));
      io::StudyRecord r = record_for(e, st);
      for (std::size_t p = 0; p < 4; ++p) io::write_volume(out / r.phase_files[p], st.phases[p]);
      io::write_volume(out / r.mask_file, st.lesion_mask);
      m.studies[i] = std::move(r);
    } catch (const std::exception& ex) {
      errors[i] = ex.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw std::runtime_error("gen: " + e);
  io::write_manifest(out / "manifest.json", m);
  return m;
}

std::vector<MemoryStudy> generate_in_memory(std::size_t n, const synth::ClassMix& mix, std::uint64_t seed) {
  const auto plan = synth::plan_corpus(n, mix, seed);
  std::vector<MemoryStudy> out(plan.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < plan.size(); ++i) {
    out[i].entry = plan[i];
    out[i].study = synth::generate_study(synth::sample_study_spec(plan[i].seed, plan[i].label));
  }
  return out;
}

std::vector<std::string> studies_in(const io::Manifest& m, std::optional<synth::Split> split) {
  std::vector<std::string> ids;
  for (const auto& s : m.studies)
    if (!split || s.split == *split) ids.push_back(s.study_id);
  return ids;
}

StudyData load_study(const fs::path& root, const io::StudyRecord& rec) {
  return {io::load_phases(root, rec), io::load_mask(root, rec)};
}

detect::DetectorModel train_detector(const io::Manifest& m, const fs::path& root, synth::Split split,
                                     const io::Config& cfg) {
  std::vector<detect::DetectorStudy> studies;
  for (const auto& s : m.studies) {
    if (s.split != split) continue;
    studies.push_back({io::load_phases(root, s), s.primary_boxes()});
  }
  if (studies.empty()) throw std::invalid_argument("train-detector: no studies in split " + std::string(synth::split_name(split)));
  return detect::train_detector(studies, cfg.feature_config(), cfg.detector_train_config());
}

std::vector<classify::ClassifierInput> region_inputs(const StudyData& d, const detect::Box3D& box, std::size_t slices,
                                                     classify::InputMode mode, const io::Config& cfg) {
  auto zs = pts::top_area_slices(pts::slice_mask_stack(d.mask, box), slices);
  if (zs.empty()) zs.push_back(middle_slice(d.mask, box));
  std::vector<classify::ClassifierInput> out;
  for (std::size_t z : zs)
    out.push_back(classify::make_input(pts::crop_slice(d.phases, d.mask, box, z, cfg.lesion_crop_margin), mode, cfg.roi_config()));
  return out;
}

std::vector<classify::LabeledInput> lesion_samples(const io::Manifest& m, const fs::path& root,
                                                   const std::vector<std::string>& ids, std::size_t slices,
                                                   classify::InputMode mode, const io::Config& cfg) {
  std::vector<classify::LabeledInput> out;
  for (const auto& id : ids) {
    const auto& rec = io::find_study(m, id);
    const StudyData d = load_study(root, rec);
    for (const auto& box : rec.primary_boxes()) {
      auto s = label_all(region_inputs(d, box, slices, mode, cfg), static_cast<std::size_t>(rec.label));
      out.insert(out.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
    }
  }
  return out;
}

std::vector<classify::LabeledInput> lesion_samples(const std::vector<MemoryStudy>& studies, synth::Split split,
                                                   std::size_t slices, classify::InputMode mode, const io::Config& cfg) {
  std::vector<classify::LabeledInput> out;
  for (const auto& ms : studies) {
    if (ms.entry.split != split) continue;
    const StudyData d = as_data(ms.study);
    for (const auto& l : ms.study.lesions) {
      if (l.role != synth::LesionRole::Primary) continue;
      auto s = label_all(region_inputs(d, l.box, slices, mode, cfg), static_cast<std::size_t>(ms.entry.label));
      out.insert(out.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
    }
  }
  return out;
}

std::vector<classify::LabeledInput> ksf_samples(const io::Manifest& m, const fs::path& root,
                                                const std::vector<harvest::QASession>& sessions,
                                                const io::Config& cfg) {
  std::vector<classify::LabeledInput> out;
  for (const auto& s : sessions) {
    if (s.status == harvest::SessionStatus::Open) continue;
    const StudyData d = load_study(root, io::find_study(m, s.study_id));
    for (std::size_t i = 0; i < s.candidates.size(); ++i) {
      if (s.verdicts[i] == harvest::Verdict::Unreviewed) continue;
      const auto& box = s.candidates[i].det.box;
      const auto zs = pts::top_area_slices(pts::slice_mask_stack(d.mask, box), cfg.train_slices);
      const std::size_t label = s.verdicts[i] == harvest::Verdict::TruePositive ? 1 : 0;
      for (std::size_t z : zs) {
        out.push_back({classify::make_input(pts::crop_slice(d.phases, d.mask, box, z, cfg.crop_margin),
                                            classify::InputMode::Sadt, cfg.roi_config()),
                       label});
      }
    }
  }
  return out;
}

std::vector<io::ClassifierBundle> train_classifiers(const std::vector<classify::LabeledInput>& samples,
                                                    std::size_t num_classes, classify::InputMode mode,
                                                    const std::string& task, const io::Config& cfg,
                                                    std::size_t members, std::vector<double> class_weights) {
  if (class_weights.empty()) {
    // Inverse class frequency, normalised to mean 1 over present classes.
    std::vector<std::size_t> counts(num_classes, 0);
    for (const auto& s : samples) ++counts.at(s.label);
    class_weights.assign(num_classes, 1.0);
    for (std::size_t c = 0; c < num_classes; ++c)
      if (counts[c]) class_weights[c] = static_cast<double>(samples.size()) / (num_classes * static_cast<double>(counts[c]));
  }
  std::vector<io::ClassifierBundle> out;
  for (std::size_t i = 0; i < members; ++i) {
    classify::TrainConfig tc = cfg.classifier_train_config();
    tc.class_weights = class_weights;
    tc.seed = i == 0 ? cfg.seed : derive_seed(cfg.seed, i);
    io::ClassifierBundle b;
    b.model = classify::train_classifier(samples, num_classes, tc);
    b.mode = mode;
    b.roi = cfg.roi_config();
    b.crop_margin = task == "ksf" ? cfg.crop_margin : cfg.lesion_crop_margin;
    b.task = task;
    out.push_back(std::move(b));
  }
  return out;
}

Prediction predict(const std::vector<io::ClassifierBundle>& members, const StudyData& d, const detect::Box3D& box,
                   std::size_t z) {
  if (members.empty()) throw std::invalid_argument("predict: no models");
  Prediction p;
  for (const auto& b : members) {
    const auto crop = pts::crop_slice(d.phases, d.mask, box, z, b.crop_margin);
    p.member_probs.push_back(classify::predict_proba(b.model, classify::make_input(crop, b.mode, b.roi)));
  }
  p.label = classify::majority_vote(p.member_probs);
  return p;
}

PtsOutcome run_pts(const StudyData& d, const std::vector<detect::DetectionCandidate>& cands,
                   const std::vector<io::ClassifierBundle>& ksf, const io::Config& cfg) {
  if (ksf.empty()) throw std::invalid_argument("pts: no key-slice classifier");
  const pts::SliceClassifier score = [&](const pts::KeySlice& ks) {
    double s = 0.0;
    for (const auto& b : ksf) s += classify::predict_proba(b.model, classify::make_input(ks.roi, b.mode, b.roi))[1];
    return s / static_cast<double>(ksf.size());
  };
  const pts::PtsResult r = pts::pts_pipeline(d.phases, cands, d.mask, score, {cfg.pts_threshold, cfg.crop_margin});
  PtsOutcome o;
  o.status = r.status;
  o.decisions = r.decisions;
  if (r.chosen) {
    o.candidate_id = r.chosen->candidate_id;
    o.box = cands[*o.candidate_id].box;
    o.z = r.chosen->z_index;
    return o;
  }
  o.fallback = true;
  if (!r.decisions.empty()) {
    const auto best = std::max_element(r.decisions.begin(), r.decisions.end(), [](const auto& a, const auto& b) {
      return a.detection_score < b.detection_score;
    });
    o.candidate_id = best->candidate_id;
    o.box = cands[best->candidate_id].box;
    o.z = pts::select_key_slice(pts::slice_mask_stack(d.mask, o.box));
  } else if (!cands.empty()) {
    o.candidate_id = 0;
    o.box = cands[0].box;
    o.z = middle_slice(d.mask, o.box);
  } else {
    const Dims3& s = d.mask.shape();
    o.box = {0.0, 0.0, 0.0, double(s[0]), double(s[1]), double(s[2])};
    o.z = s[2] / 2;
  }
  return o;
}

}  // namespace dyntex::pipeline
