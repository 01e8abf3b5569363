#pragma once

#include "ioda/service/session.hpp"

#include <memory>

namespace ioda::service {

struct ServerConfig {
  std::string address = "127.0.0.1";
  unsigned short port = 0;  // 0 picks a free port
  double tick_hz = 20.0;
};

/// WebSocket endpoint `/session` (one TeleopSession per connection) and `/healthz`.
/// Ticks are paced by a per-connection timer at the configured rate; reads, ticks and writes of a
/// connection are serialized on its strand.
class TeleopServer {
 public:
  TeleopServer(ServerConfig cfg, std::shared_ptr<const SessionConfig> session_cfg);
  ~TeleopServer();
  TeleopServer(const TeleopServer&) = delete;
  TeleopServer& operator=(const TeleopServer&) = delete;

  /// Binds and starts serving on a background thread. Throws when the port cannot be bound.
  void start();
  unsigned short port() const;
  /// Sends a final done/terminated message to open sessions and releases everything. Idempotent.
  void stop();
  bool running() const;
  std::size_t session_count() const;
  /// Episode logs of sessions that have closed.
  std::vector<pc::EpisodeReport> closed_session_reports() const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace ioda::service
