#include "dyntex/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <csignal>
#include <iostream>
#include <optional>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "dyntex/cli/gradcheck_suite.hpp"
#include "dyntex/cli/review_server.hpp"
#include "dyntex/classify/train.hpp"
#include "dyntex/eval/metrics.hpp"
#include "dyntex/harvest/harvest.hpp"
#include "dyntex/io/candidates.hpp"
#include "dyntex/pipeline/pipeline.hpp"

namespace dyntex::cli {
namespace {

namespace fs = std::filesystem;
using io::Json;

inline constexpr int kOutputSchemaVersion = 1;

// Failure with an exit status, reported as one JSON line.
struct CommandError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;

  void add(CLI::App* sub) {
    sub->add_option("--config", config, "JSON config overriding the defaults")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Seed overriding the config");
  }

  io::Config load() const {
    io::Config c = config.empty() ? io::Config{} : io::load_config(config);
    if (seed) c.seed = *seed;
    io::validate_config(c);
    return c;
  }
};

struct Corpus {
  fs::path root;
  io::Manifest manifest;
};

Corpus open_corpus(const std::string& dir) {
  Corpus c{dir, io::read_manifest(fs::path(dir) / "manifest.json")};
  return c;
}

std::optional<synth::Split> split_arg(const std::string& s) {
  if (s == "all") return std::nullopt;
  return synth::parse_split(s);
}

fs::path candidate_file(const fs::path& dir, const std::string& study_id) { return dir / (study_id + ".csv"); }

harvest::HarvestConfig harvest_config(const io::Config& c) {
  harvest::HarvestConfig h;
  h.topk = c.topk;
  h.nms_iou = c.nms_iou;
  h.margin = c.crop_margin;
  h.cell = c.montage_cell;
  h.window = {c.window_level, c.window_width};
  return h;
}

void print_json(const Json& j) { std::cout << j.dump(2) << "\n"; }

// --- gen -------------------------------------------------------------------

int cmd_gen(const io::Config& cfg, std::size_t n, const std::vector<double>& mix_arg, const std::string& out) {
  synth::ClassMix mix = synth::kDefaultMix;
  if (!mix_arg.empty()) {
    if (mix_arg.size() != kNumLesionClasses) throw CommandError("--mix needs 4 comma-separated fractions");
    std::copy(mix_arg.begin(), mix_arg.end(), mix.begin());
  }
  const auto m = pipeline::generate_corpus(out, n, mix, cfg.seed);
  print_json({{"studies", m.studies.size()}, {"seed", cfg.seed}, {"out", out}});
  return 0;
}

// --- gradcheck -------------------------------------------------------------

int cmd_gradcheck(const GradCheckOptions& opts) {
  const auto results = run_gradcheck_suite(opts);
  std::vector<std::string> failed;
  for (const auto& r : results) {
    std::cout << fmt::format("{:<22} instances={} max_rel_error={:.3e} {:.2f}s {}\n", r.name, r.instances,
                             r.max_rel_error, r.seconds, r.passed ? "PASS" : "FAIL");
    if (!r.passed) failed.push_back(r.name);
  }
  if (!failed.empty()) throw CommandError(fmt::format("gradient check failed: {}", fmt::join(failed, ",")));
  return 0;
}

// --- training --------------------------------------------------------------

int cmd_train_detector(const io::Config& cfg, const std::string& data, const std::string& split,
                       const std::string& out) {
  const Corpus c = open_corpus(data);
  const auto s = split_arg(split);
  if (!s) throw CommandError("train-detector needs a single split");
  const auto model = pipeline::train_detector(c.manifest, c.root, *s, cfg);
  io::save_detector(out, model);
  print_json({{"checkpoint", out}, {"studies", pipeline::studies_in(c.manifest, s).size()}});
  return 0;
}

int cmd_train_classifier(const io::Config& cfg, const std::string& data, const std::string& mode,
                         const std::string& split, std::size_t ensemble, const std::string& sessions,
                         const std::string& out) {
  const Corpus c = open_corpus(data);
  const auto sp = split_arg(split);
  const auto ids = pipeline::studies_in(c.manifest, sp);
  std::vector<io::ClassifierBundle> members;
  std::size_t n_samples = 0;
  if (mode == "ksf") {
    if (sessions.empty()) throw CommandError("--mode ksf needs --sessions");
    std::vector<harvest::QASession> reviewed;
    for (auto& s : harvest::SessionStore(sessions).load_all())
      if (std::find(ids.begin(), ids.end(), s.study_id) != ids.end()) reviewed.push_back(std::move(s));
    const auto samples = pipeline::ksf_samples(c.manifest, c.root, reviewed, cfg);
    std::array<std::size_t, 2> counts{};
    for (const auto& s : samples) ++counts[s.label];
    if (counts[0] == 0 || counts[1] == 0)
      throw CommandError(fmt::format("key-slice training needs both classes (non-primary {}, primary {})", counts[0],
                                     counts[1]));
    n_samples = samples.size();
    members = pipeline::train_classifiers(samples, 2, classify::InputMode::Sadt, "ksf", cfg, ensemble,
                                          cfg.ksf_class_weights);
  } else {
    const auto m = classify::parse_input_mode(mode);
    const auto samples = pipeline::lesion_samples(c.manifest, c.root, ids, cfg.train_slices, m, cfg);
    if (samples.empty()) throw CommandError("no training samples in split " + split);
    n_samples = samples.size();
    members = pipeline::train_classifiers(samples, kNumLesionClasses, m, "lesion", cfg, ensemble, cfg.class_weights);
  }
  io::save_classifiers(out, members);
  print_json({{"checkpoint", out}, {"mode", mode}, {"members", members.size()}, {"samples", n_samples}});
  return 0;
}

// --- detect / harvest ------------------------------------------------------

int cmd_detect(const io::Config& cfg, const std::string& data, const std::string& detector, const std::string& split,
               std::size_t topk, const std::string& out) {
  const Corpus c = open_corpus(data);
  const auto model = io::load_detector(detector);
  const auto ids = pipeline::studies_in(c.manifest, split_arg(split));
  fs::create_directories(out);
  for (const auto& id : ids) {
    const auto phases = io::load_phases(c.root, io::find_study(c.manifest, id));
    io::write_candidates(candidate_file(out, id), id, detect::detect_study(model, phases, topk, cfg.nms_iou));
  }
  print_json({{"studies", ids.size()}, {"out", out}});
  return 0;
}

int cmd_harvest(const io::Config& cfg, const std::string& data, const std::string& detector, const std::string& split,
                bool auto_accept, const std::string& manual_out, const std::string& out) {
  const Corpus c = open_corpus(data);
  const auto model = io::load_detector(detector);
  harvest::SessionStore store(out);
  const auto ids = pipeline::studies_in(c.manifest, split_arg(split));
  const auto result = harvest::harvest_run(c.manifest, c.root, ids, model, harvest_config(cfg), store);
  Json summary{{"sessions", result.sessions.size()}, {"skipped", Json::array()}};
  for (const auto& s : result.skipped) summary["skipped"].push_back({{"study_id", s.study_id}, {"reason", s.reason}});
  if (auto_accept) {
    harvest::ManualBoxes manual;
    for (const auto& s : result.sessions) {
      const auto& rec = io::find_study(c.manifest, s.study_id);
      harvest::QASession done = s;
      if (s.status == harvest::SessionStatus::Open) done = harvest::auto_review(store, s.session_id, rec.primary_boxes(), cfg.hit_iou);
      if (done.status == harvest::SessionStatus::NeedsManual) manual[s.study_id] = rec.primary_boxes();
    }
    if (!manual_out.empty()) harvest::write_manual_sidecar(manual_out, manual);
    const auto report = harvest::labor_report(store.load_all(), {cfg.qa_minutes, cfg.manual_minutes});
    summary["needs_manual"] = manual.size();
    summary["report"] = labor_report_json(report);
  }
  print_json(summary);
  return 0;
}

// --- review server ---------------------------------------------------------

ReviewServer* g_server = nullptr;

extern "C" void on_signal(int) {
  if (g_server) g_server->stop();
}

int cmd_review_serve(const io::Config& cfg, const std::string& sessions, const std::string& host, int port) {
  if (!fs::is_directory(sessions)) throw CommandError("session directory '" + sessions + "' does not exist");
  harvest::SessionStore store(sessions);
  ReviewServer server(store, {{cfg.qa_minutes, cfg.manual_minutes}, {cfg.window_level, cfg.window_width}});
  const int bound = server.bind(host, port);
  if (bound < 0) throw CommandError(fmt::format("cannot bind {}:{}", host, port));
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << fmt::format("listening on {}:{}", host, bound) << std::endl;
  server.listen();
  g_server = nullptr;
  return 0;
}

// --- pts / classify / eval -------------------------------------------------

Json pts_study_json(const std::string& id, const pipeline::PtsOutcome& o) {
  Json dec = Json::array();
  for (const auto& d : o.decisions)
    dec.push_back({{"candidate_id", d.candidate_id},
                   {"is_primary", d.is_primary},
                   {"classifier_score", d.classifier_score},
                   {"detection_score", d.detection_score}});
  return {{"study_id", id},
          {"status", std::string(pts::status_name(o.status))},
          {"fallback", o.fallback},
          {"candidate_id", o.candidate_id ? Json(*o.candidate_id) : Json(nullptr)},
          {"box", io::box_to_json(o.box)},
          {"z", o.z},
          {"decisions", dec}};
}

struct PtsChoice {
  std::string study_id;
  detect::Box3D box;
  std::size_t z = 0;
};

std::vector<PtsChoice> read_pts(const std::string& path) {
  const Json j = io::read_json(path);
  if (io::get_field<int>(j, "schema_version", path) != kOutputSchemaVersion)
    throw CommandError(path + ": unsupported schema_version");
  std::vector<PtsChoice> out;
  for (const auto& s : io::get_field<Json>(j, "studies", path))
    out.push_back({io::get_field<std::string>(s, "study_id", path), io::box_from_json(io::get_field<Json>(s, "box", path)),
                   io::get_field<std::size_t>(s, "z", path)});
  return out;
}

int cmd_pts(const io::Config& cfg, const std::string& data, const std::string& candidates, const std::string& ksf_dir,
            const std::string& split, const std::string& out) {
  const Corpus c = open_corpus(data);
  const auto ksf = io::load_classifiers(ksf_dir);
  for (const auto& b : ksf)
    if (b.task != "ksf") throw CommandError(ksf_dir + " is not a key-slice classifier");
  Json studies = Json::array();
  for (const auto& id : pipeline::studies_in(c.manifest, split_arg(split))) {
    const auto d = pipeline::load_study(c.root, io::find_study(c.manifest, id));
    const auto cands = io::read_candidates(candidate_file(candidates, id), id);
    studies.push_back(pts_study_json(id, pipeline::run_pts(d, cands, ksf, cfg)));
  }
  io::write_json(out, {{"schema_version", kOutputSchemaVersion}, {"studies", studies}});
  print_json({{"studies", studies.size()}, {"out", out}});
  return 0;
}

int cmd_classify(const std::string& data, const std::string& pts_path, const std::string& model_dir,
                 std::optional<std::size_t> ensemble, const std::string& out) {
  const Corpus c = open_corpus(data);
  auto members = io::load_classifiers(model_dir);
  for (const auto& b : members)
    if (b.task != "lesion") throw CommandError(model_dir + " is not a lesion classifier");
  const std::size_t k = ensemble.value_or(members.size());
  if (k == 0 || k > members.size())
    throw CommandError(fmt::format("--ensemble {} but the checkpoint has {} members", k, members.size()));
  members.resize(k);
  Json studies = Json::array();
  for (const auto& choice : read_pts(pts_path)) {
    const auto d = pipeline::load_study(c.root, io::find_study(c.manifest, choice.study_id));
    const auto p = pipeline::predict(members, d, choice.box, choice.z);
    Json votes = Json::array();
    std::vector<double> mean(kNumLesionClasses, 0.0);
    for (const auto& probs : p.member_probs) {
      votes.push_back(std::string(class_name(static_cast<LesionClass>(classify::argmax(probs)))));
      for (std::size_t q = 0; q < kNumLesionClasses; ++q) mean[q] += probs[q] / static_cast<double>(k);
    }
    studies.push_back({{"study_id", choice.study_id},
                       {"label", std::string(class_name(static_cast<LesionClass>(p.label)))},
                       {"votes", votes},
                       {"mean_probs", mean}});
  }
  io::write_json(out, {{"schema_version", kOutputSchemaVersion},
                       {"mode", std::string(classify::input_mode_name(members.front().mode))},
                       {"ensemble", k},
                       {"studies", studies}});
  print_json({{"studies", studies.size()}, {"out", out}});
  return 0;
}

int cmd_eval(const io::Config& cfg, const std::string& data, const std::string& split, const std::string& candidates,
             const std::string& pts_path, const std::string& predictions, const std::string& sessions,
             const std::string& out) {
  if (candidates.empty() && pts_path.empty() && predictions.empty() && sessions.empty())
    throw CommandError("eval needs at least one of --candidates, --pts, --predictions, --sessions");
  const Corpus c = open_corpus(data);
  const auto ids = pipeline::studies_in(c.manifest, split_arg(split));
  std::map<std::string, double> metrics;
  if (!candidates.empty()) {
    std::vector<eval::StudyDetections> dets;
    for (const auto& id : ids)
      dets.push_back({io::find_study(c.manifest, id).primary_boxes(), io::read_candidates(candidate_file(candidates, id), id)});
    metrics["p1td_1"] = eval::p1td(dets, 1, cfg.hit_iou);
    metrics["p1td_10"] = eval::p1td(dets, 10, cfg.hit_iou);
    metrics["n_detection_studies"] = static_cast<double>(dets.size());
  }
  if (!pts_path.empty()) {
    std::size_t hits = 0, n = 0;
    for (const auto& choice : read_pts(pts_path)) {
      if (std::find(ids.begin(), ids.end(), choice.study_id) == ids.end()) continue;
      ++n;
      hits += eval::key_slice_hit(choice.box, choice.z, io::find_study(c.manifest, choice.study_id).primary_boxes());
    }
    if (n == 0) throw CommandError(pts_path + " has no study of split " + split);
    metrics["key_slice_hit_rate"] = static_cast<double>(hits) / static_cast<double>(n);
  }
  if (!predictions.empty()) {
    const Json j = io::read_json(predictions);
    std::vector<std::size_t> truth, pred;
    for (const auto& s : io::get_field<Json>(j, "studies", predictions)) {
      const auto id = io::get_field<std::string>(s, "study_id", predictions);
      if (std::find(ids.begin(), ids.end(), id) == ids.end()) continue;
      const auto label = parse_class(io::get_field<std::string>(s, "label", predictions));
      if (!label) throw CommandError(predictions + ": unknown label for study " + id);
      truth.push_back(static_cast<std::size_t>(io::find_study(c.manifest, id).label));
      pred.push_back(static_cast<std::size_t>(*label));
    }
    if (truth.empty()) throw CommandError(predictions + " has no study of split " + split);
    const auto t = eval::tally(truth, pred, kNumLesionClasses);
    metrics["accuracy"] = eval::accuracy(t);
    metrics["mean_f1"] = eval::mean_f1(t);
    for (auto cl : kLesionClasses)
      metrics["f1_" + std::string(class_name(cl))] = eval::f1_one_vs_all(t, static_cast<std::size_t>(cl));
    metrics["n_classified_studies"] = static_cast<double>(truth.size());
  }
  if (!sessions.empty()) {
    const auto r = harvest::labor_report(harvest::SessionStore(sessions).load_all(), {cfg.qa_minutes, cfg.manual_minutes});
    metrics["labor_total_minutes"] = r.total_minutes;
    metrics["labor_baseline_minutes"] = r.baseline_minutes;
    metrics["labor_savings_fraction"] = r.savings_fraction;
    metrics["labor_manual_studies"] = static_cast<double>(r.n_manual_studies);
  }
  const std::string report = eval::format_report(metrics);
  if (!out.empty()) io::write_text(out, report);
  std::cout << report;
  return 0;
}

void report_error(const std::string& command, const std::string& message) {
  std::cerr << Json{{"error", message}, {"command", command}}.dump() << std::endl;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Liver lesion texture pipeline on synthetic multi-phase CT"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off");

  Common common;
  auto with_common = [&](CLI::App* sub) {
    common.add(sub);
    return sub;
  };

  std::size_t n = 0;
  std::vector<double> mix;
  std::string out, data, detector, sessions, mode, candidates, ksf, pts_file, model, predictions, manual_out;
  // One split variable per subcommand, each with its own default.
  std::string split_td = "train", split_tc = "train", split_dt = "all", split_hv = "train", split_pt = "test",
              split_ev = "test";
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t topk = 0, ensemble = 1;
  std::optional<std::size_t> classify_ensemble;
  bool auto_accept = false;
  GradCheckOptions grad;
  std::string plant;
  bool list_checks = false;

  auto* gen = with_common(app.add_subcommand("gen", "Generate a synthetic corpus and manifest"));
  gen->add_option("--n", n, "Number of studies")->required()->check(CLI::PositiveNumber);
  gen->add_option("--mix", mix, "Class fractions HCC,ICC,Benign,Metastasis")->delimiter(',');
  gen->add_option("--out", out, "Output directory")->required();

  auto* gc = app.add_subcommand("gradcheck", "Check every backward pass against finite differences");
  gc->add_option("--instances", grad.instances, "Random instances per check")->check(CLI::PositiveNumber);
  gc->add_option("--seed", grad.seed, "Seed of the random instances");
  gc->add_option("--plant-bug", plant, "Double the analytic gradient of one check");
  gc->add_flag("--list", list_checks, "List the registered checks");

  auto* td = with_common(app.add_subcommand("train-detector", "Train the detection heads"));
  td->add_option("--data", data, "Corpus directory")->required();
  td->add_option("--split", split_td, "Training split")->capture_default_str();
  td->add_option("--out", out, "Checkpoint directory")->required();

  auto* tc = with_common(app.add_subcommand("train-classifier", "Train lesion or key-slice classifiers"));
  tc->add_option("--data", data, "Corpus directory")->required();
  tc->add_option("--mode", mode, "sadt, deepten or ksf")->required()->check(CLI::IsMember({"sadt", "deepten", "ksf"}));
  tc->add_option("--split", split_tc, "Training split")->capture_default_str();
  tc->add_option("--ensemble", ensemble, "Number of members")->check(CLI::PositiveNumber);
  tc->add_option("--sessions", sessions, "Reviewed QA sessions (ksf)");
  tc->add_option("--out", out, "Checkpoint directory")->required();

  auto* dt = with_common(app.add_subcommand("detect", "Write ranked candidates per study"));
  dt->add_option("--data", data, "Corpus directory")->required();
  dt->add_option("--detector", detector, "Detector checkpoint")->required();
  dt->add_option("--split", split_dt, "train, val, test or all")->capture_default_str();
  dt->add_option("--topk", topk, "Candidates per study (default from config)");
  dt->add_option("--out", out, "Candidate directory")->required();

  auto* hv = with_common(app.add_subcommand("harvest", "Create QA sessions and montages"));
  hv->add_option("--data", data, "Corpus directory")->required();
  hv->add_option("--detector", detector, "Detector checkpoint")->required();
  hv->add_option("--split", split_hv, "train, val, test or all")->capture_default_str();
  hv->add_flag("--auto-accept", auto_accept, "Review with the ground-truth oracle and finalize");
  hv->add_option("--manual-out", manual_out, "Sidecar with oracle boxes for needs_manual studies");
  hv->add_option("--out", out, "Session directory")->required();

  auto* rs = with_common(app.add_subcommand("review-serve", "Serve the review API"));
  rs->add_option("--sessions", sessions, "Session directory")->required();
  rs->add_option("--host", host, "Bind address");
  rs->add_option("--port", port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));

  auto* pt = with_common(app.add_subcommand("pts", "Select the primary tumour key slice per study"));
  pt->add_option("--data", data, "Corpus directory")->required();
  pt->add_option("--candidates", candidates, "Candidate directory")->required();
  pt->add_option("--ksf", ksf, "Key-slice classifier checkpoint")->required();
  pt->add_option("--split", split_pt, "train, val, test or all")->capture_default_str();
  pt->add_option("--out", out, "Output JSON")->required();

  auto* cl = with_common(app.add_subcommand("classify", "Label each selected key slice"));
  cl->add_option("--data", data, "Corpus directory")->required();
  cl->add_option("--pts", pts_file, "Output of pts")->required();
  cl->add_option("--model", model, "Classifier checkpoint")->required();
  cl->add_option("--ensemble", classify_ensemble, "Use the first k members")->check(CLI::PositiveNumber);
  cl->add_option("--out", out, "Output JSON")->required();

  auto* ev = with_common(app.add_subcommand("eval", "Compute metrics"));
  ev->add_option("--data", data, "Corpus directory")->required();
  ev->add_option("--split", split_ev, "train, val, test or all")->capture_default_str();
  ev->add_option("--candidates", candidates, "Candidate directory");
  ev->add_option("--pts", pts_file, "Output of pts");
  ev->add_option("--predictions", predictions, "Output of classify");
  ev->add_option("--sessions", sessions, "Finalized QA sessions");
  ev->add_option("--out", out, "Report file");

  std::string command = "dyntex";
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    const auto subs = app.get_subcommands();
    report_error(subs.empty() ? command : subs.front()->get_name(), e.what());
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  command = sub->get_name();
  try {
    spdlog::set_level(spdlog::level::from_str(log_level));
    if (sub == gc) {
      if (list_checks) {
        for (const auto& name : gradcheck_names()) std::cout << name << "\n";
        return 0;
      }
      if (!plant.empty()) grad.plant_bug = plant;
      return cmd_gradcheck(grad);
    }
    const io::Config cfg = common.load();
    if (sub == gen) return cmd_gen(cfg, n, mix, out);
    if (sub == td) return cmd_train_detector(cfg, data, split_td, out);
    if (sub == tc) return cmd_train_classifier(cfg, data, mode, split_tc, ensemble, sessions, out);
    if (sub == dt) return cmd_detect(cfg, data, detector, split_dt, topk ? topk : cfg.topk, out);
    if (sub == hv) return cmd_harvest(cfg, data, detector, split_hv, auto_accept, manual_out, out);
    if (sub == rs) return cmd_review_serve(cfg, sessions, host, port);
    if (sub == pt) return cmd_pts(cfg, data, candidates, ksf, split_pt, out);
    if (sub == cl) return cmd_classify(data, pts_file, model, classify_ensemble, out);
    if (sub == ev) return cmd_eval(cfg, data, split_ev, candidates, pts_file, predictions, sessions, out);
  } catch (const std::exception& e) {
    report_error(command, e.what());
    return 1;
  }
  report_error(command, "unhandled subcommand");
  return 1;
}

}  // namespace dyntex::cli
