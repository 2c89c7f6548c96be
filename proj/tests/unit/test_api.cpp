#include <doctest.h>

#include <httplib.h>

#include <filesystem>
#include <thread>
#include <unistd.h>

#include "dyntex/cli/review_server.hpp"
#include "dyntex/harvest/montage.hpp"

using namespace dyntex;
using namespace dyntex::harvest;
using io::Json;
namespace fs = std::filesystem;

namespace {

std::vector<SessionCandidate> candidates(std::size_t n) {
  std::vector<SessionCandidate> c;
  for (std::size_t i = 0; i < n; ++i) {
    const double o = 3.0 + 9.0 * i;
    c.push_back({i, {0.8 - 0.1 * i, {o, o, 1, o + 6, o + 6, 4}, Phase::V}, 2});
  }
  return c;
}

std::array<Volume, 4> phases() {
  std::array<Volume, 4> v;
  for (std::size_t p = 0; p < 4; ++p) {
    v[p] = Volume({40, 40, 6}, {1, 1, 5}, kContrastPhases[p]);
    for (std::size_t i = 0; i < v[p].voxels.size(); ++i)
      v[p].voxels.data[i] = static_cast<float>(-300.0 + 0.5 * (i % 1200) + 30.0 * p);
  }
  return v;
}

// Three sessions: "a" (3 candidates), "b" (2 candidates), "empty" (none).
// A live server on a free port, torn down with the fixture.
struct Fixture {
  fs::path root;
  std::unique_ptr<SessionStore> store;
  std::unique_ptr<cli::ReviewServer> server;
  std::thread thread;
  int port = -1;
  MontageSource src_a;

  Fixture() : root(fs::temp_directory_path() / ("dyntex_api_" + std::to_string(::getpid()))) {
    fs::remove_all(root);
    store = std::make_unique<SessionStore>(root);
    const auto ph = phases();
    src_a = montage_source(ph, candidates(3), 16, 12, 0.25);
    const auto src_b = montage_source(ph, candidates(2), 16, 12, 0.25);
    store->create(open_session("a", "a", candidates(3)), &src_a, {});
    store->create(open_session("b", "b", candidates(2)), &src_b, {});
    store->create(open_session("empty", "empty", {}), nullptr, {});
    start();
  }
  void start() {
    server = std::make_unique<cli::ReviewServer>(*store, cli::ReviewServerConfig{});
    port = server->bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    thread = std::thread([this] { server->listen(); });
    server->wait_until_ready();
  }
  void stop() {
    server->stop();
    thread.join();
  }
  ~Fixture() {
    stop();
    fs::remove_all(root);
  }
  httplib::Client client() const { return httplib::Client("127.0.0.1", port); }
};

Json body(const httplib::Result& r) {
  REQUIRE(r);
  return Json::parse(r->body);
}

httplib::Result post_verdict(httplib::Client& c, const std::string& id, Json b) {
  return c.Post("/api/sessions/" + id + "/verdicts", b.dump(), "application/json");
}

}  // namespace

TEST_CASE("session list and detail") {
  Fixture f;
  auto c = f.client();
  auto r = c.Get("/api/sessions");
  REQUIRE(r);
  CHECK(r->status == 200);
  const auto list = body(r);
  CHECK(list["schema_version"] == cli::kApiSchemaVersion);
  REQUIRE(list["sessions"].size() == 3);
  CHECK(list["sessions"][0] == Json{{"session_id", "a"}, {"study_id", "a"}, {"status", "open"},
                                    {"n_candidates", 3}, {"n_reviewed", 0}});
  CHECK(list["sessions"][2]["status"] == "needs_manual");

  const auto d = body(c.Get("/api/sessions/a"));
  CHECK(d["schema_version"] == cli::kApiSchemaVersion);
  CHECK(d["montage"] == Json{{"width", 64}, {"height", 36}, {"cell_width", 16}, {"cell_height", 12}});
  REQUIRE(d["candidates"].size() == 3);
  const auto& c1 = d["candidates"][1];
  CHECK(c1["candidate_id"] == 1);
  CHECK(c1["verdict"] == "unreviewed");
  CHECK(c1["phase"] == "V");
  CHECK(c1["key_z"] == 2);
  REQUIRE(c1["cells"].size() == 4);
  CHECK(c1["cells"][2] == Json{{"phase", "V"}, {"row", 1}, {"col", 2}, {"x", 32}, {"y", 12}, {"width", 16}, {"height", 12}});

  const auto e = body(c.Get("/api/sessions/empty"));
  CHECK(e["montage"].is_null());
  CHECK(e["candidates"].empty());

  r = c.Get("/api/sessions/nope");
  REQUIRE(r);
  CHECK(r->status == 404);
  CHECK(body(r)["schema_version"] == cli::kApiSchemaVersion);
  CHECK(body(r).contains("error"));
  r = c.Get("/api/nothing-here");
  REQUIRE(r);
  CHECK(r->status == 404);
  CHECK(body(r)["schema_version"] == cli::kApiSchemaVersion);
}

TEST_CASE("montage is re-windowed on demand") {
  Fixture f;
  auto c = f.client();
  auto r = c.Get("/api/sessions/a/montage");
  REQUIRE(r);
  CHECK(r->status == 200);
  CHECK(r->get_header_value("X-Schema-Version") == "1");
  CHECK(r->body.rfind("P5\n# schema_version 1\n", 0) == 0);
  CHECK(io::decode_pgm(r->body) == window_montage(f.src_a, {}).image);

  r = c.Get("/api/sessions/a/montage?level=-100&width=150");
  REQUIRE(r);
  CHECK(io::decode_pgm(r->body) == window_montage(f.src_a, {-100, 150}).image);
  CHECK(io::decode_pgm(r->body) != window_montage(f.src_a, {}).image);

  for (const char* bad : {"?width=0", "?width=-5", "?level=abc", "?width=1e400x"}) {
    CAPTURE(bad);
    r = c.Get(std::string("/api/sessions/a/montage") + bad);
    REQUIRE(r);
    CHECK(r->status == 400);
  }
  r = c.Get("/api/sessions/empty/montage");
  REQUIRE(r);
  CHECK(r->status == 404);
}

TEST_CASE("verdict cycle and finalize gating") {
  Fixture f;
  auto c = f.client();
  // unreviewed -> true_positive -> false_positive -> unreviewed
  for (const char* v : {"true_positive", "false_positive", "unreviewed"}) {
    const auto d = body(post_verdict(c, "a", {{"candidate_id", 0}, {"verdict", v}}));
    CHECK(d["candidates"][0]["verdict"] == v);
    CHECK(d["schema_version"] == cli::kApiSchemaVersion);
  }
  CHECK(body(c.Get("/api/sessions/a"))["n_reviewed"] == 0);

  // finalize refused while unreviewed candidates remain
  auto r = c.Post("/api/sessions/a/finalize");
  REQUIRE(r);
  CHECK(r->status == 409);

  post_verdict(c, "a", {{"candidate_id", 0}, {"verdict", "false_positive"}});
  post_verdict(c, "a", {{"candidate_id", 1}, {"verdict", "true_positive"}});
  const auto twice = body(post_verdict(c, "a", {{"candidate_id", 1}, {"verdict", "true_positive"}}));
  CHECK(twice["n_reviewed"] == 2);
  post_verdict(c, "a", {{"candidate_id", 2}, {"verdict", "false_positive"}});
  const auto fin = body(c.Post("/api/sessions/a/finalize"));
  CHECK(fin["status"] == "finalized");
  CHECK(fin["schema_version"] == cli::kApiSchemaVersion);

  r = post_verdict(c, "a", {{"candidate_id", 0}, {"verdict", "true_positive"}});
  REQUIRE(r);
  CHECK(r->status == 409);
  r = c.Post("/api/sessions/a/finalize");
  REQUIRE(r);
  CHECK(r->status == 409);
}

TEST_CASE("all false positives end in needs_manual") {
  Fixture f;
  auto c = f.client();
  for (int i = 0; i < 2; ++i) post_verdict(c, "b", {{"candidate_id", i}, {"verdict", "false_positive"}});
  CHECK(body(c.Post("/api/sessions/b/finalize"))["status"] == "needs_manual");
  CHECK(body(c.Get("/api/sessions/b"))["status"] == "needs_manual");
}

TEST_CASE("malformed verdict requests") {
  Fixture f;
  auto c = f.client();
  const std::vector<std::string> bad{R"({"candidate_id": 9, "verdict": "true_positive"})",
                                     R"({"candidate_id": -1, "verdict": "true_positive"})",
                                     R"({"candidate_id": "0", "verdict": "true_positive"})",
                                     R"({"candidate_id": 0, "verdict": "maybe"})",
                                     R"({"candidate_id": 0})",
                                     R"([0, "true_positive"])",
                                     "not json"};
  for (const auto& b : bad) {
    CAPTURE(b);
    const auto r = c.Post("/api/sessions/a/verdicts", b, "application/json");
    REQUIRE(r);
    CHECK(r->status == 400);
    CHECK(body(r)["schema_version"] == cli::kApiSchemaVersion);
  }
  const auto r = post_verdict(c, "nope", {{"candidate_id", 0}, {"verdict", "true_positive"}});
  REQUIRE(r);
  CHECK(r->status == 404);
  CHECK(body(c.Get("/api/sessions/a"))["n_reviewed"] == 0);
}

TEST_CASE("labor report requires closed sessions") {
  Fixture f;
  auto c = f.client();
  auto r = c.Get("/api/report");
  REQUIRE(r);
  CHECK(r->status == 409);
  post_verdict(c, "a", {{"candidate_id", 0}, {"verdict", "true_positive"}});
  for (int i = 1; i < 3; ++i) post_verdict(c, "a", {{"candidate_id", i}, {"verdict", "false_positive"}});
  for (int i = 0; i < 2; ++i) post_verdict(c, "b", {{"candidate_id", i}, {"verdict", "false_positive"}});
  c.Post("/api/sessions/a/finalize");
  c.Post("/api/sessions/b/finalize");
  r = c.Get("/api/report");
  REQUIRE(r);
  CHECK(r->status == 200);
  const auto rep = body(r);
  CHECK(rep["schema_version"] == cli::kApiSchemaVersion);
  CHECK(rep["n_studies"] == 3);
  CHECK(rep["n_manual_studies"] == 2);
  CHECK(rep["total_minutes"] == 33.0);
  CHECK(rep["baseline_minutes"] == 45.0);
  CHECK(rep["savings_fraction"].get<double>() == doctest::Approx(1.0 - 33.0 / 45.0));
}

TEST_CASE("a restarted server reproduces the stored state") {
  Fixture f;
  auto c = f.client();
  post_verdict(c, "a", {{"candidate_id", 2}, {"verdict", "false_positive"}});
  post_verdict(c, "a", {{"candidate_id", 0}, {"verdict", "true_positive"}});
  const auto before = body(c.Get("/api/sessions/a"));
  f.stop();
  f.store = std::make_unique<SessionStore>(f.root);
  f.start();
  auto c2 = f.client();
  CHECK(body(c2.Get("/api/sessions/a")) == before);
}

TEST_CASE("concurrent verdicts from several clients") {
  Fixture f;
  std::vector<std::thread> clients;
  for (int t = 0; t < 3; ++t)
    clients.emplace_back([&f, t] {
      auto c = f.client();
      for (int round = 0; round < 5; ++round)
        post_verdict(c, "a", {{"candidate_id", t}, {"verdict", round % 2 ? "false_positive" : "true_positive"}});
    });
  for (auto& t : clients) t.join();
  auto c = f.client();
  const auto d = body(c.Get("/api/sessions/a"));
  CHECK(d["n_reviewed"] == 3);
  for (int i = 0; i < 3; ++i) CHECK(d["candidates"][i]["verdict"] == "true_positive");
}
