#include "dyntex/cli/review_server.hpp"

#include <httplib.h>

#include <charconv>
#include <optional>

#include <spdlog/spdlog.h>

#include "dyntex/io/pgm.hpp"

namespace dyntex::cli {

using io::Json;

Json session_summary_json(const harvest::QASession& s) {
  return {{"session_id", s.session_id},
          {"study_id", s.study_id},
          {"status", std::string(harvest::status_name(s.status))},
          {"n_candidates", s.candidates.size()},
          {"n_reviewed", s.n_reviewed()}};
}

Json session_detail_json(const harvest::QASession& s, const harvest::MontageSource* montage) {
  Json j = session_summary_json(s);
  j["schema_version"] = kApiSchemaVersion;
  std::vector<harvest::MontageCell> cells;
  if (montage) cells = montage->cells();
  Json cands = Json::array();
  for (std::size_t i = 0; i < s.candidates.size(); ++i) {
    const auto& c = s.candidates[i];
    Json geo = Json::array();
    for (const auto& cell : cells) {
      if (cell.candidate_id != c.candidate_id) continue;
      geo.push_back({{"phase", std::string(phase_name(cell.phase))},
                     {"row", cell.row},
                     {"col", cell.col},
                     {"x", cell.x},
                     {"y", cell.y},
                     {"width", cell.width},
                     {"height", cell.height}});
    }
    cands.push_back({{"candidate_id", c.candidate_id},
                     {"phase", std::string(phase_name(c.det.phase))},
                     {"score", c.det.score},
                     {"box", io::box_to_json(c.det.box)},
                     {"key_z", c.key_z},
                     {"verdict", std::string(harvest::verdict_name(s.verdicts[i]))},
                     {"cells", geo}});
  }
  j["candidates"] = cands;
  if (montage)
    j["montage"] = {{"width", montage->width()},
                    {"height", montage->height()},
                    {"cell_width", montage->cell_w},
                    {"cell_height", montage->cell_h}};
  else
    j["montage"] = nullptr;
  return j;
}

Json labor_report_json(const harvest::LaborReport& r) {
  return {{"schema_version", kApiSchemaVersion},
          {"n_studies", r.n_studies},
          {"n_qa_minutes", r.n_qa_minutes},
          {"n_manual_studies", r.n_manual_studies},
          {"n_manual_minutes", r.n_manual_minutes},
          {"total_minutes", r.total_minutes},
          {"baseline_minutes", r.baseline_minutes},
          {"savings_fraction", r.savings_fraction}};
}

namespace {

struct HttpError {
  int status;
  std::string message;
};

void send_json(httplib::Response& res, int status, Json body) {
  if (!body.contains("schema_version")) body["schema_version"] = kApiSchemaVersion;
  res.status = status;
  res.set_header("X-Schema-Version", std::to_string(kApiSchemaVersion));
  res.set_content(body.dump(), "application/json");
}

std::optional<double> parse_number(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

struct ReviewServer::Impl {
  harvest::SessionStore& store;
  ReviewServerConfig cfg;
  httplib::Server server;

  Impl(harvest::SessionStore& st, ReviewServerConfig c) : store(st), cfg(c) { routes(); }

  std::string require_session(const httplib::Request& req) const {
    const std::string id = req.matches[1];
    if (!store.contains(id)) throw HttpError{404, "unknown session '" + id + "'"};
    return id;
  }

  // Runs a handler, mapping failures onto the documented status codes.
  template <class F>
  httplib::Server::Handler guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const HttpError& e) {
        send_json(res, e.status, {{"error", e.message}});
      } catch (const harvest::SessionConflict& e) {
        send_json(res, 409, {{"error", e.what()}});
      } catch (const harvest::UnknownCandidate& e) {
        send_json(res, 400, {{"error", e.what()}});
      } catch (const Json::exception& e) {
        send_json(res, 400, {{"error", std::string("malformed body: ") + e.what()}});
      } catch (const std::exception& e) {
        spdlog::error("review-serve: {} {}: {}", req.method, req.path, e.what());
        send_json(res, 500, {{"error", e.what()}});
      }
    };
  }

  void routes() {
    server.Get("/api/sessions", guarded([this](const httplib::Request&, httplib::Response& res) {
                 Json list = Json::array();
                 for (const auto& s : store.load_all()) list.push_back(session_summary_json(s));
                 send_json(res, 200, {{"sessions", list}});
               }));
    server.Get(R"(/api/sessions/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const std::string id = require_session(req);
                 send_json(res, 200, detail(store.load(id)));
               }));
    server.Get(R"(/api/sessions/([^/]+)/montage)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const std::string id = require_session(req);
                 const auto s = store.load(id);
                 if (s.candidates.empty()) throw HttpError{404, "session '" + id + "' has no montage"};
                 harvest::Window w = cfg.window;
                 for (auto [key, dst] : {std::pair{"level", &w.level}, std::pair{"width", &w.width}}) {
                   if (!req.has_param(key)) continue;
                   const auto v = parse_number(req.get_param_value(key));
                   if (!v) throw HttpError{400, std::string("query parameter '") + key + "' is not a number"};
                   *dst = *v;
                 }
                 if (w.width <= 0.0) throw HttpError{400, "window width must be positive"};
                 const auto m = harvest::window_montage(store.montage(id), w);
                 res.status = 200;
                 res.set_header("X-Schema-Version", std::to_string(kApiSchemaVersion));
                 res.set_content(io::encode_pgm(m.image, "schema_version " + std::to_string(kApiSchemaVersion)),
                                 "image/x-portable-graymap");
               }));
    server.Post(R"(/api/sessions/([^/]+)/verdicts)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const std::string id = require_session(req);
                  const Json body = Json::parse(req.body);
                  if (!body.is_object()) throw HttpError{400, "body must be an object"};
                  if (!body.contains("candidate_id") || !body["candidate_id"].is_number_unsigned())
                    throw HttpError{400, "candidate_id must be a non-negative integer"};
                  if (!body.contains("verdict") || !body["verdict"].is_string())
                    throw HttpError{400, "verdict must be a string"};
                  const auto v = harvest::parse_verdict(body["verdict"].get<std::string>());
                  if (!v) throw HttpError{400, "unknown verdict '" + body["verdict"].get<std::string>() + "'"};
                  send_json(res, 200, detail(store.record(id, body["candidate_id"].get<std::size_t>(), *v)));
                }));
    server.Post(R"(/api/sessions/([^/]+)/finalize)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const std::string id = require_session(req);
                  const auto s = store.finalize(id);
                  send_json(res, 200, {{"session_id", s.session_id}, {"status", std::string(harvest::status_name(s.status))}});
                }));
    server.Get("/api/report", guarded([this](const httplib::Request&, httplib::Response& res) {
                 send_json(res, 200, labor_report_json(harvest::labor_report(store.load_all(), cfg.labor)));
               }));
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (res.body.empty()) send_json(res, res.status, {{"error", httplib::status_message(res.status)}});
    });
  }

  Json detail(const harvest::QASession& s) const {
    if (s.candidates.empty()) return session_detail_json(s, nullptr);
    const auto m = store.montage(s.session_id);
    return session_detail_json(s, &m);
  }
};

ReviewServer::ReviewServer(harvest::SessionStore& store, ReviewServerConfig cfg)
    : impl_(std::make_unique<Impl>(store, cfg)) {}

ReviewServer::~ReviewServer() = default;

int ReviewServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool ReviewServer::listen() { return impl_->server.listen_after_bind(); }

void ReviewServer::stop() { impl_->server.stop(); }

void ReviewServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace dyntex::cli
