// Acceptance suite: one PASS/FAIL line per criterion, exit 0 iff all pass.
//   dyntex_acceptance [--only name] [--list] [--keep] [--expect-fail name]...
//
// --expect-fail marks a criterion whose shortfall is known: it still runs and
// prints FAIL, but does not set the exit code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/spdlog.h>

#include "dyntex/classify/ensemble.hpp"
#include "dyntex/classify/focal.hpp"
#include "dyntex/classify/train.hpp"
#include "dyntex/cli/commands.hpp"
#include "dyntex/cli/gradcheck_suite.hpp"
#include "dyntex/detect/decode.hpp"
#include "dyntex/harvest/labor.hpp"
#include "dyntex/io/json_util.hpp"
#include "dyntex/pipeline/pipeline.hpp"
#include "dyntex/texture/encoding.hpp"

namespace fs = std::filesystem;
using namespace dyntex;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

fs::path g_work;

void run(const std::vector<std::string>& args) {
  // Keep command chatter out of the criterion lines.
  std::ostringstream sink;
  auto* old = std::cout.rdbuf(sink.rdbuf());
  const int rc = cli::run_cli(args);
  std::cout.rdbuf(old);
  if (rc != 0) throw std::runtime_error(fmt::format("command failed ({}): {}", rc, fmt::join(args, " ")));
}

std::map<std::string, double> read_report(const fs::path& p) {
  std::map<std::string, double> m;
  std::ifstream in(p);
  std::string k;
  double v;
  while (in >> k >> v) m[k] = v;
  return m;
}

// --- gradient suite ----------------------------------------------------------

Outcome gradient_suite() {
  const auto t0 = Clock::now();
  const auto results = cli::run_gradcheck_suite({});
  const double secs = since(t0);
  bool ok = secs < 60.0;
  double worst = 0.0;
  std::size_t min_inst = SIZE_MAX;
  std::string failed;
  for (const auto& r : results) {
    ok = ok && r.passed && r.instances >= 20;
    worst = std::max(worst, r.max_rel_error);
    min_inst = std::min(min_inst, r.instances);
    if (!r.passed) failed += " " + r.name;
  }
  return {ok, fmt::format("{} checks, >= {} instances each, max rel err {:.2e} (< 1e-4), {:.1f}s (< 60s){}",
                          results.size(), min_inst, worst, secs, failed.empty() ? "" : "; failed:" + failed)};
}

// --- SaDT algebra --------------------------------------------------------------

Outcome sadt_algebra() {
  using namespace texture;
  Rng rng(4242);
  double row_err = 0, shift_err = 0, subset_err = 0, perm_err = 0, norm_err = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    const std::size_t M = 2 + rng.below(12), K = 1 + rng.below(6), D = 1 + rng.below(6);
    DescriptorField f{Tensor64({M, D}), {1, M}};
    for (auto& v : f.descriptors.storage()) v = rng.uniform(-2, 2);
    Codebook book = init_codebook(K, D, 1.0, rng);
    for (auto& s : book.smoothing.storage()) s = rng.uniform(0.1, 2.0);
    AggregationMask mask{Tensor64({M}, 0.0)};
    // Every tenth instance has an all-zero mask.
    if (t % 10 != 0)
      for (auto& d : mask.delta.storage()) d = rng.uniform() < 0.6 ? 1.0 : 0.0;
    const auto e = encode_forward(f, book, mask);

    for (std::size_t i = 0; i < M; ++i) {
      double s = 0;
      for (std::size_t k = 0; k < K; ++k) s += e.intermediates.assignments(i, k);
      row_err = std::max(row_err, std::abs(s - 1.0));
    }
    double n2 = 0;
    for (double v : e.flattened_normalized.storage()) n2 += v * v;
    const double n = std::sqrt(n2);
    norm_err = std::max(norm_err, n == 0.0 ? 0.0 : std::abs(n - 1.0));
    bool any = false;
    for (double d : mask.delta.storage()) any = any || d != 0.0;
    if (!any && n != 0.0) norm_err = 1.0;

    DescriptorField fs = f;
    Codebook bs = book;
    for (std::size_t d = 0; d < D; ++d) {
      const double c = rng.uniform(-10, 10);
      for (std::size_t i = 0; i < M; ++i) fs.descriptors(i, d) += c;
      for (std::size_t k = 0; k < K; ++k) bs.codewords(k, d) += c;
    }
    const auto es = encode_forward(fs, bs, mask);
    for (std::size_t j = 0; j < e.flattened_normalized.size(); ++j)
      shift_err = std::max(shift_err, std::abs(es.flattened_normalized[j] - e.flattened_normalized[j]));

    std::vector<std::size_t> perm(M);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm.begin(), perm.end());
    DescriptorField fp = f;
    AggregationMask mp = mask;
    for (std::size_t i = 0; i < M; ++i) {
      for (std::size_t d = 0; d < D; ++d) fp.descriptors(i, d) = f.descriptors(perm[i], d);
      mp.delta[i] = mask.delta[perm[i]];
    }
    const auto ep = encode_forward(fp, book, mp);
    for (std::size_t j = 0; j < e.flattened_normalized.size(); ++j)
      perm_err = std::max(perm_err, std::abs(ep.flattened_normalized[j] - e.flattened_normalized[j]));

    std::vector<double> kept;
    for (std::size_t i = 0; i < M; ++i)
      if (mask.delta[i] == 1.0)
        for (std::size_t d = 0; d < D; ++d) kept.push_back(f.descriptors(i, d));
    if (!kept.empty()) {
      const std::size_t Ms = kept.size() / D;
      const auto esub = encode_forward({Tensor64({Ms, D}, kept), {1, Ms}}, book, AggregationMask::ones(Ms));
      for (std::size_t j = 0; j < e.per_codeword.size(); ++j)
        subset_err = std::max(subset_err, std::abs(esub.per_codeword[j] - e.per_codeword[j]));
    }
  }
  const bool ok = row_err < 1e-6 && shift_err < 1e-6 && subset_err < 1e-6 && perm_err < 1e-6 && norm_err < 1e-6;
  return {ok, fmt::format("{} instances: row sums {:.1e}, translation {:.1e}, mask/subset {:.1e}, permutation {:.1e}, "
                          "norm {:.1e} (all < 1e-6)",
                          trials, row_err, shift_err, subset_err, perm_err, norm_err)};
}

// --- detection round trip ---------------------------------------------------------

Outcome detection_round_trip() {
  using namespace detect;
  Rng rng(777);
  int good = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    const int R = 1 + static_cast<int>(rng.below(4));
    const Dims3 out{24 + rng.below(16), 24 + rng.below(16), 8 + rng.below(12)};
    const std::size_t n = 1 + rng.below(5);
    std::vector<CenterSize> boxes;
    for (int attempt = 0; boxes.size() < n && attempt < 1000; ++attempt) {
      CenterSize cs;
      for (int a = 0; a < 3; ++a) cs.p[a] = rng.uniform(0.0, out[a] * R - 1e-6);
      cs.s = {rng.uniform(1, 16), rng.uniform(1, 16), rng.uniform(1, 8)};
      bool far = true;
      for (const auto& b : boxes) {
        double d = 0;
        for (int a = 0; a < 3; ++a) d = std::max(d, std::abs(std::floor(b.p[a] / R) - std::floor(cs.p[a] / R)));
        far = far && d >= 5.0;
      }
      if (far) boxes.push_back(cs);
    }
    const auto tgt = render_targets(boxes, out, R, GaussianSpec{1.0, {1.0, 1.0, rng.uniform(1.0, 3.0)}});
    const auto cands = decode_peaks(tgt.heatmap, tgt.offsets, tgt.sizes, R, 10);
    bool ok = cands.size() == boxes.size();
    for (const auto& b : boxes) {
      bool found = false;
      for (const auto& c : cands) {
        const auto got = box_to_center_size(c.box);
        bool match = true;
        for (int a = 0; a < 3; ++a)
          match = match && std::abs(got.p[a] - b.p[a]) <= R && std::abs(got.s[a] - b.s[a]) < 1e-9;
        found = found || match;
      }
      ok = ok && found;
    }
    good += ok;
  }
  return {good == trials, fmt::format("{}/{} trials recovered every box (centre within R, exact size)", good, trials)};
}

// --- hand values --------------------------------------------------------------------

Outcome hand_values() {
  using namespace detect;
  const auto t = render_targets({{{5.5, 5.5, 5.5}, {4, 4, 4}}}, {12, 12, 12}, 1, GaussianSpec{1.0, {1, 1, 1}});
  const double gauss = t.heatmap(6, 5, 5);

  const auto one = render_targets({{{2.5, 2.5, 2.5}, {4, 4, 4}}}, {5, 5, 5}, 1, GaussianSpec{1.0, {1, 1, 1}});
  VectorField pred;
  for (int a = 0; a < 3; ++a) pred[a] = one.sizes[a];
  for (int a = 0; a < 3; ++a) pred[a](2, 2, 2) += a + 1.0;
  const double l1 = size_loss(pred, one);

  Grid3<double> p(one.heatmap.dims, 0.0);
  p(2, 2, 2) = 0.5;
  const double focal = heatmap_focal_loss(p, one, LossConfig{});

  const double iou = iou3d({0, 0, 0, 2, 2, 2}, {1, 0, 0, 3, 2, 2});
  const double cls = classify::weighted_focal_loss(Tensor64({4}, std::vector<double>{0.5, 0.2, 0.2, 0.1}), 0,
                                                   classify::default_class_weights(), 2.0);
  const bool ok = std::abs(gauss - 0.60653) < 1e-4 && std::abs(l1 - 6.0) < 1e-4 && std::abs(focal - 0.17329) < 1e-4 &&
                  std::abs(iou - 1.0 / 3.0) < 1e-4 && std::abs(cls - 0.86643) < 1e-4;
  return {ok, fmt::format("gaussian {:.5f} (0.60653), size L1 {:.5f} (6.0), heatmap focal {:.5f} (0.17329), "
                          "IoU {:.5f} (0.33333), weighted focal {:.5f} (0.86643)",
                          gauss, l1, focal, iou, cls)};
}

Outcome labor() {
  const auto r = harvest::labor_report(1001, 193);
  return {std::abs(r.savings_fraction - 0.7405) <= 1e-4,
          fmt::format("n=1001, manual=193: total {:.0f} min, baseline {:.0f} min, savings {:.6f} (0.7405 +- 1e-4)",
                      r.total_minutes, r.baseline_minutes, r.savings_fraction)};
}

// --- synthetic end to end -------------------------------------------------------------

struct EndToEnd {
  bool ran = false;
  std::string error;
  double seconds = 0;
  std::map<std::string, double> report;
  io::Json predictions;
};

EndToEnd& end_to_end_run() {
  static EndToEnd e2e;
  if (e2e.ran) return e2e;
  e2e.ran = true;
  const fs::path w = g_work / "e2e";
  fs::create_directories(w);
  auto P = [&](const char* name) { return (w / name).string(); };
  const auto t0 = Clock::now();
  try {
    run({"gen", "--n", "60", "--seed", "7", "--out", P("corpus")});
    run({"train-detector", "--data", P("corpus"), "--out", P("detector")});
    run({"detect", "--data", P("corpus"), "--detector", P("detector"), "--topk", "10", "--out", P("candidates")});
    run({"harvest", "--data", P("corpus"), "--detector", P("detector"), "--auto-accept", "--manual-out",
         P("manual.json"), "--out", P("sessions")});
    run({"train-classifier", "--data", P("corpus"), "--mode", "ksf", "--sessions", P("sessions"), "--out", P("ksf")});
    run({"pts", "--data", P("corpus"), "--candidates", P("candidates"), "--ksf", P("ksf"), "--out", P("pts.json")});
    run({"train-classifier", "--data", P("corpus"), "--mode", "sadt", "--ensemble", "5", "--out", P("sadt")});
    run({"classify", "--data", P("corpus"), "--pts", P("pts.json"), "--model", P("sadt"), "--ensemble", "5", "--out",
         P("predictions.json")});
    run({"eval", "--data", P("corpus"), "--candidates", P("candidates"), "--pts", P("pts.json"), "--predictions",
         P("predictions.json"), "--sessions", P("sessions"), "--out", P("report.txt")});
    e2e.report = read_report(P("report.txt"));
    e2e.predictions = io::read_json(P("predictions.json"));
  } catch (const std::exception& ex) {
    e2e.error = ex.what();
  }
  e2e.seconds = since(t0);
  return e2e;
}

struct Comparison {
  double sadt = 0, deepten = 0, seconds = 0;
  std::size_t n_test = 0;
};

// The 400-study corpus behind the accuracy comparisons: 120 test studies, so
// one study moves accuracy by under one point.
struct ComparisonCorpus {
  std::vector<pipeline::MemoryStudy> studies;
  std::vector<classify::LabeledInput> train, test;  // SaDT inputs
};

const ComparisonCorpus& comparison_corpus() {
  static const ComparisonCorpus c = [] {
    const io::Config cfg;
    ComparisonCorpus out;
    out.studies = pipeline::generate_in_memory(400, synth::kDefaultMix, cfg.seed);
    out.train = pipeline::lesion_samples(out.studies, synth::Split::Train, cfg.train_slices, classify::InputMode::Sadt, cfg);
    out.test = pipeline::lesion_samples(out.studies, synth::Split::Test, 1, classify::InputMode::Sadt, cfg);
    return out;
  }();
  return c;
}

double accuracy_of(const classify::ClassifierModel& m, const std::vector<classify::LabeledInput>& test) {
  std::size_t ok = 0;
  for (const auto& s : test) ok += classify::argmax(classify::predict_proba(m, s.input)) == s.label;
  return static_cast<double>(ok) / static_cast<double>(test.size());
}

// Same corpus, same crops and training schedule; only the input mode differs.
Comparison sadt_vs_deepten() {
  const auto t0 = Clock::now();
  const io::Config cfg;
  const auto& corpus = comparison_corpus();
  Comparison c;
  for (auto mode : {classify::InputMode::Sadt, classify::InputMode::DeepTen}) {
    const bool sadt = mode == classify::InputMode::Sadt;
    const auto train = sadt ? corpus.train : pipeline::lesion_samples(corpus.studies, synth::Split::Train, cfg.train_slices, mode, cfg);
    const auto test = sadt ? corpus.test : pipeline::lesion_samples(corpus.studies, synth::Split::Test, 1, mode, cfg);
    const auto members = pipeline::train_classifiers(train, kNumLesionClasses, mode, "lesion", cfg, 1, cfg.class_weights);
    (sadt ? c.sadt : c.deepten) = accuracy_of(members[0].model, test);
    c.n_test = test.size();
  }
  c.seconds = since(t0);
  return c;
}

Outcome end_to_end() {
  const auto& e = end_to_end_run();
  if (!e.error.empty()) return {false, "pipeline error: " + e.error};
  const auto cmp = sadt_vs_deepten();
  const double p10 = e.report.at("p1td_10"), p1 = e.report.at("p1td_1"), hit = e.report.at("key_slice_hit_rate");
  const double gap = 100.0 * (cmp.sadt - cmp.deepten);
  const double total = e.seconds + cmp.seconds;
  std::printf("  info end_to_end: P1TD-10 %.3f (>= 0.95) %s\n", p10, p10 >= 0.95 ? "ok" : "MISS");
  std::printf("  info end_to_end: P1TD-1 %.3f (>= 0.80) %s\n", p1, p1 >= 0.80 ? "ok" : "MISS");
  std::printf("  info end_to_end: key-slice hit rate %.3f (>= 0.90) %s\n", hit, hit >= 0.90 ? "ok" : "MISS");
  std::printf("  info end_to_end: SaDT %.3f vs DeepTEN %.3f on %zu test studies, gap %.1f points (>= 5) %s\n", cmp.sadt,
              cmp.deepten, cmp.n_test, gap, gap >= 5.0 ? "ok" : "MISS");
  std::printf("  info end_to_end: 60-study pipeline %.0fs + 400-study comparison %.0fs = %.0fs (< 600s) %s\n",
              e.seconds, cmp.seconds, total, total < 600.0 ? "ok" : "MISS");
  const bool ok = p10 >= 0.95 && p1 >= 0.80 && hit >= 0.90 && gap >= 5.0 && total < 600.0;
  return {ok, fmt::format("P1TD-10 {:.3f}, P1TD-1 {:.3f}, key-slice hit {:.3f}, SaDT-DeepTEN {:+.1f} points, {:.0f}s",
                          p10, p1, hit, gap, total)};
}

Outcome ensemble() {
  // Reported for reference: the 60-study run has too few test studies to
  // resolve a one-point difference.
  const auto& e = end_to_end_run();
  if (e.error.empty()) {
    const io::Json j = io::read_json(g_work / "e2e" / "corpus" / "manifest.json");
    std::map<std::string, std::string> truth;
    for (const auto& s : j["studies"]) truth[s["study_id"]] = s["label"];
    const std::size_t k = e.predictions["ensemble"].get<std::size_t>();
    std::vector<std::size_t> member_ok(k, 0);
    std::size_t vote_ok = 0, n = 0;
    for (const auto& s : e.predictions["studies"]) {
      const std::string t = truth.at(s["study_id"].get<std::string>());
      ++n;
      vote_ok += s["label"].get<std::string>() == t;
      for (std::size_t m = 0; m < k; ++m) member_ok[m] += s["votes"][m].get<std::string>() == t;
    }
    std::printf("  info ensemble_vote: 60-study pipeline, %zu test studies: vote %.3f, best single %.3f\n", n,
                static_cast<double>(vote_ok) / n,
                static_cast<double>(*std::max_element(member_ok.begin(), member_ok.end())) / n);
  }

  const io::Config cfg;
  const auto& corpus = comparison_corpus();
  const auto members =
      pipeline::train_classifiers(corpus.train, kNumLesionClasses, classify::InputMode::Sadt, "lesion", cfg, 5, cfg.class_weights);
  std::vector<std::size_t> member_ok(members.size(), 0);
  std::size_t vote_ok = 0;
  for (const auto& s : corpus.test) {
    std::vector<Tensor64> probs;
    for (std::size_t m = 0; m < members.size(); ++m) {
      probs.push_back(classify::predict_proba(members[m].model, s.input));
      member_ok[m] += classify::argmax(probs.back()) == s.label;
    }
    vote_ok += classify::majority_vote(probs) == s.label;
  }
  const double n = static_cast<double>(corpus.test.size());
  const double vote = vote_ok / n;
  const double best = *std::max_element(member_ok.begin(), member_ok.end()) / n;
  std::string singles;
  for (auto c : member_ok) singles += fmt::format(" {:.3f}", c / n);
  return {vote >= best - 0.01, fmt::format("5-member SaDT vote {:.3f} vs best single {:.3f} (members{}) on {} test studies",
                                           vote, best, singles, corpus.test.size())};
}

// --- determinism -------------------------------------------------------------------

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    files[fs::relative(e.path(), root).string()] = std::string(std::istreambuf_iterator<char>(in), {});
  }
  return files;
}

// Verdict logs with the timestamp column dropped; everything else verbatim.
std::map<std::string, std::string> session_tree(const fs::path& root) {
  auto files = tree(root);
  for (auto& [name, text] : files) {
    if (fs::path(name).filename() != "verdicts.tsv") continue;
    std::istringstream in(text);
    std::string line, kept;
    while (std::getline(in, line)) kept += line.substr(0, line.rfind('\t')) + "\n";
    text = kept;
  }
  return files;
}

Outcome determinism() {
  const fs::path base = g_work / "determinism";
  fs::create_directories(base);
  io::write_json(base / "config.json", {{"det_epochs", 4}, {"cls_epochs", 3}});
  const std::string cfg = (base / "config.json").string();
  for (const char* run_name : {"a", "b"}) {
    const fs::path w = base / run_name;
    auto P = [&](const char* name) { return (w / name).string(); };
    run({"gen", "--n", "12", "--seed", "3", "--out", P("gen")});
    run({"train-detector", "--config", cfg, "--data", P("gen"), "--out", P("train-detector")});
    run({"detect", "--config", cfg, "--data", P("gen"), "--detector", P("train-detector"), "--out", P("detect")});
    run({"harvest", "--config", cfg, "--data", P("gen"), "--detector", P("train-detector"), "--auto-accept", "--out",
         (w.parent_path() / (std::string("sessions_") + run_name)).string()});
    run({"train-classifier", "--config", cfg, "--data", P("gen"), "--mode", "ksf", "--sessions",
         (w.parent_path() / (std::string("sessions_") + run_name)).string(), "--out", P("train-ksf")});
    run({"train-classifier", "--config", cfg, "--data", P("gen"), "--mode", "sadt", "--ensemble", "2", "--out",
         P("train-sadt")});
    run({"train-classifier", "--config", cfg, "--data", P("gen"), "--mode", "deepten", "--out", P("train-deepten")});
    run({"eval", "--config", cfg, "--data", P("gen"), "--split", "all", "--candidates", P("detect"), "--out",
         P("eval.txt")});
  }
  auto a = tree(base / "a"), b = tree(base / "b");
  for (auto& [name, bytes] : session_tree(base / "sessions_a")) a["sessions/" + name] = bytes;
  for (auto& [name, bytes] : session_tree(base / "sessions_b")) b["sessions/" + name] = bytes;
  std::vector<std::string> differ;
  for (const auto& [name, bytes] : a) {
    auto it = b.find(name);
    if (it == b.end() || it->second != bytes) differ.push_back(name);
  }
  if (a.size() != b.size()) differ.push_back("<file count>");
  return {differ.empty() && !a.empty(),
          fmt::format("gen, train-detector, train-classifier (sadt, deepten, ksf), detect, harvest, eval: {} files compared, {} differ{}",
                      a.size(), differ.size(), differ.empty() ? "" : " (first: " + differ.front() + ")")};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> fn;
};

}  // namespace

int main(int argc, char** argv) {
  std::string only;
  std::set<std::string> expect_fail;
  bool keep = false, list = false;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) only = argv[++i];
    else if (a == "--expect-fail" && i + 1 < argc) expect_fail.insert(argv[++i]);
    else if (a == "--keep") keep = true;
    else if (a == "--list") list = true;
    else {
      std::fprintf(stderr, "usage: %s [--only name] [--list] [--keep] [--expect-fail name]...\n", argv[0]);
      return 2;
    }
  }
  spdlog::set_level(spdlog::level::err);
  const std::vector<Criterion> criteria = {
      {"gradient_suite", gradient_suite}, {"sadt_algebra", sadt_algebra},
      {"detection_round_trip", detection_round_trip}, {"hand_values", hand_values},
      {"labor_report", labor}, {"end_to_end", end_to_end},
      {"ensemble_vote", ensemble}, {"determinism", determinism},
  };
  if (list) {
    for (const auto& c : criteria) std::printf("%s\n", c.name);
    return 0;
  }
  g_work = fs::temp_directory_path() / fmt::format("dyntex_acceptance_{}", ::getpid());
  fs::create_directories(g_work);
  for (const auto& name : expect_fail) {
    if (std::none_of(criteria.begin(), criteria.end(), [&](const Criterion& c) { return name == c.name; })) {
      std::fprintf(stderr, "no criterion named '%s'\n", name.c_str());
      return 2;
    }
  }
  int failures = 0, ran = 0;
  std::vector<std::string> expected;
  for (const auto& c : criteria) {
    if (!only.empty() && only != c.name) continue;
    ++ran;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const bool known = expect_fail.count(c.name) > 0;
    if (!o.pass && known) expected.push_back(c.name);
    else failures += !o.pass;
    std::printf("%s %-22s %s [%.1fs]%s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), since(t0),
                known ? (o.pass ? " (listed as expected failure)" : " (expected failure)") : "");
    std::fflush(stdout);
  }
  if (keep) std::printf("work directory kept at %s\n", g_work.c_str());
  else fs::remove_all(g_work);
  if (ran == 0) {
    std::fprintf(stderr, "no criterion named '%s'\n", only.c_str());
    return 2;
  }
  const int passed = ran - failures - static_cast<int>(expected.size());
  std::printf("%d/%d criteria passed", passed, ran);
  if (!expected.empty()) std::printf(", expected failures: %s", fmt::format("{}", fmt::join(expected, " ")).c_str());
  std::printf("\n");
  return failures == 0 ? 0 : 1;
}
