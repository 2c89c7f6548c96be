#pragma once

#include <memory>
#include <string>

#include "dyntex/harvest/labor.hpp"
#include "dyntex/harvest/verdict_store.hpp"
#include "dyntex/io/json_util.hpp"

namespace dyntex::cli {

inline constexpr int kApiSchemaVersion = 1;

struct ReviewServerConfig {
  harvest::LaborConfig labor;
  harvest::Window window;  // used when the montage request omits level/width
};

/// Response documents, shared with the CLI so both print the same shapes.
io::Json session_summary_json(const harvest::QASession& s);
io::Json session_detail_json(const harvest::QASession& s, const harvest::MontageSource* montage);
io::Json labor_report_json(const harvest::LaborReport& r);

/// HTTP review API over a session store. Errors are
/// {"schema_version":1,"error":"..."} with 400 (bad request), 404 (unknown
/// session) or 409 (state conflict).
class ReviewServer {
 public:
  ReviewServer(harvest::SessionStore& store, ReviewServerConfig cfg);
  ~ReviewServer();
  ReviewServer(const ReviewServer&) = delete;
  ReviewServer& operator=(const ReviewServer&) = delete;

  /// Binds; port 0 picks a free port. Returns the bound port, or -1.
  int bind(const std::string& host, int port);
  /// Blocks serving requests until stop().
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dyntex::cli
