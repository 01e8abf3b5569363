#include "ioda/service/teleop_server.hpp"

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <atomic>
#include <condition_variable>
#include <deque>
#include <list>
#include <thread>

namespace ioda::service {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

class Connection;

struct TeleopServer::Impl {
  ServerConfig cfg;
  std::shared_ptr<const SessionConfig> session_cfg;
  net::io_context ioc{1};
  std::optional<tcp::acceptor> acceptor;
  std::thread thread;
  std::atomic<bool> running{false};
  std::atomic<bool> stopped{false};
  unsigned short bound_port = 0;
  std::atomic<std::uint64_t> next_id{1};

  mutable std::mutex mu;
  std::condition_variable cv;
  std::list<std::weak_ptr<Connection>> connections;
  std::size_t open_sessions = 0;
  std::vector<pc::EpisodeReport> closed_reports;

  void do_accept();
  void on_session_open();
  void on_session_closed(const TeleopSession& s);
};

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, TeleopServer::Impl& server)
      : stream_(std::move(socket)), server_(server), timer_(stream_.get_executor()) {}

  void run() {
    net::dispatch(stream_.get_executor(), [self = shared_from_this()] { self->read_request(); });
  }

  /// Thread-safe: queues the final message and closes.
  void terminate() {
    net::post(stream_.get_executor(), [self = shared_from_this()] {
      if (!self->ws_ || self->closing_) return;
      self->send(self->session_->terminate());
      self->closing_ = true;
      self->timer_.cancel();
      self->maybe_close();
    });
  }

 private:
  void read_request() {
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, request_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_request(ec); });
  }

  void on_request(beast::error_code ec) {
    if (ec) return;
    stream_.expires_never();
    if (websocket::is_upgrade(request_)) {
      if (request_.target() != "/session" || server_.stopped) return respond(http::status::not_found, "{\"error\":\"not found\"}");
      ws_.emplace(std::move(stream_));
      ws_->set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
      ws_->async_accept(request_, [self = shared_from_this()](beast::error_code e) { self->on_accept(e); });
      return;
    }
    if (request_.method() == http::verb::get && request_.target() == "/healthz") {
      std::size_t n;
      {
        std::lock_guard lock(server_.mu);
        n = server_.open_sessions;
      }
      return respond(http::status::ok, json{{"status", "ok"}, {"sessions", n}}.dump());
    }
    respond(http::status::not_found, "{\"error\":\"not found\"}");
  }

  void respond(http::status status, std::string body) {
    auto res = std::make_shared<http::response<http::string_body>>(status, request_.version());
    res->set(http::field::content_type, "application/json");
    res->keep_alive(false);
    res->body() = std::move(body);
    res->prepare_payload();
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
      beast::error_code ignored;
      self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
    });
  }

  void on_accept(beast::error_code ec) {
    if (ec) return;
    session_ = std::make_unique<TeleopSession>("s" + std::to_string(server_.next_id++), server_.session_cfg);
    server_.on_session_open();
    opened_ = true;
    ws_->text(true);
    send(session_->hello());
    if (server_.stopped) {
      terminate();
      return;
    }
    period_ = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(1.0 / server_.cfg.tick_hz));
    next_tick_ = std::chrono::steady_clock::now() + period_;
    schedule_tick();
    read_message();
  }

  void schedule_tick() {
    timer_.expires_at(next_tick_);
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (ec || self->closing_) return;
      for (auto& m : self->session_->tick()) self->send(std::move(m));
      self->next_tick_ += self->period_;
      self->schedule_tick();
    });
  }

  void read_message() {
    ws_->async_read(in_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->on_closed();
      const std::string text = beast::buffers_to_string(self->in_.data());
      self->in_.consume(self->in_.size());
      if (!self->closing_)
        for (auto& m : self->session_->handle(text)) self->send(std::move(m));
      self->read_message();
    });
  }

  void send(std::string msg) {
    out_.push_back(std::move(msg));
    if (out_.size() == 1) write_next();
  }

  void write_next() {
    ws_->async_write(net::buffer(out_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->on_closed();
      self->out_.pop_front();
      if (!self->out_.empty())
        self->write_next();
      else
        self->maybe_close();
    });
  }

  void maybe_close() {
    if (!closing_ || !out_.empty() || close_sent_) return;
    close_sent_ = true;
    ws_->async_close(websocket::close_code::going_away,
                     [self = shared_from_this()](beast::error_code) { self->on_closed(); });
    // A peer that never answers the close frame is dropped after a grace period.
    timer_.expires_after(std::chrono::milliseconds(500));
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (ec || !self->opened_) return;
      beast::error_code ignored;
      beast::get_lowest_layer(*self->ws_).socket().close(ignored);
      self->on_closed();
    });
  }

  void on_closed() {
    timer_.cancel();
    if (!opened_) return;
    opened_ = false;
    server_.on_session_closed(*session_);
  }

  beast::tcp_stream stream_;
  TeleopServer::Impl& server_;
  net::steady_timer timer_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> request_;
  std::optional<websocket::stream<beast::tcp_stream>> ws_;
  beast::flat_buffer in_;
  std::deque<std::string> out_;
  std::unique_ptr<TeleopSession> session_;
  std::chrono::steady_clock::duration period_{};
  std::chrono::steady_clock::time_point next_tick_{};
  bool opened_ = false;
  bool closing_ = false;
  bool close_sent_ = false;
};

void TeleopServer::Impl::do_accept() {
  acceptor->async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;
    auto conn = std::make_shared<Connection>(std::move(socket), *this);
    {
      std::lock_guard lock(mu);
      connections.remove_if([](const auto& w) { return w.expired(); });
      connections.push_back(conn);
    }
    conn->run();
    do_accept();
  });
}

void TeleopServer::Impl::on_session_open() {
  std::lock_guard lock(mu);
  ++open_sessions;
}

void TeleopServer::Impl::on_session_closed(const TeleopSession& s) {
  {
    std::lock_guard lock(mu);
    --open_sessions;
    closed_reports.push_back(s.report());
  }
  cv.notify_all();
}

TeleopServer::TeleopServer(ServerConfig cfg, std::shared_ptr<const SessionConfig> session_cfg)
    : impl_(std::make_unique<Impl>()) {
  if (!(cfg.tick_hz > 0.0)) throw Error("TeleopServer: tick rate must be positive");
  if (!session_cfg) throw pc::MissingArtifact("TeleopServer: no session configuration");
  impl_->cfg = std::move(cfg);
  impl_->session_cfg = std::move(session_cfg);
}

TeleopServer::~TeleopServer() { stop(); }

void TeleopServer::start() {
  if (impl_->running) return;
  if (impl_->stopped) throw Error("TeleopServer: cannot restart a stopped server");
  auto& im = *impl_;
  const tcp::endpoint ep(net::ip::make_address(im.cfg.address), im.cfg.port);
  im.acceptor.emplace(im.ioc);
  beast::error_code ec;
  im.acceptor->open(ep.protocol(), ec);
  if (!ec) im.acceptor->set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) im.acceptor->bind(ep, ec);
  if (!ec) im.acceptor->listen(net::socket_base::max_listen_connections, ec);
  if (ec) throw Error("TeleopServer: cannot listen on " + im.cfg.address + ":" + std::to_string(im.cfg.port) + ": " + ec.message());
  im.bound_port = im.acceptor->local_endpoint().port();
  im.do_accept();
  im.running = true;
  im.thread = std::thread([&im] { im.ioc.run(); });
}

unsigned short TeleopServer::port() const { return impl_->bound_port; }
bool TeleopServer::running() const { return impl_->running && !impl_->stopped; }

std::size_t TeleopServer::session_count() const {
  std::lock_guard lock(impl_->mu);
  return impl_->open_sessions;
}

std::vector<pc::EpisodeReport> TeleopServer::closed_session_reports() const {
  std::lock_guard lock(impl_->mu);
  return impl_->closed_reports;
}

void TeleopServer::stop() {
  auto& im = *impl_;
  if (im.stopped.exchange(true)) return;
  if (!im.running) return;
  net::post(im.ioc, [&im] {
    beast::error_code ec;
    im.acceptor->close(ec);
  });
  std::vector<std::shared_ptr<Connection>> live;
  {
    std::lock_guard lock(im.mu);
    for (auto& w : im.connections)
      if (auto c = w.lock()) live.push_back(std::move(c));
  }
  for (auto& c : live) c->terminate();
  live.clear();
  {
    std::unique_lock lock(im.mu);
    im.cv.wait_for(lock, std::chrono::seconds(3), [&im] { return im.open_sessions == 0; });
  }
  im.ioc.stop();
  if (im.thread.joinable()) im.thread.join();
  im.running = false;
}

}  // namespace ioda::service
