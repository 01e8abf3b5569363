#include "ioda/service/teleop_server.hpp"
#include "support/fixtures.hpp"

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <doctest.h>

#include <chrono>
#include <future>

using namespace ioda;
using namespace ioda::service;
namespace beast = boost::beast;
namespace asio = boost::asio;
using tcp = asio::ip::tcp;

namespace {

std::shared_ptr<const SessionConfig> nav_session(pc::ConditionKind initial = pc::ConditionKind::ioda) {
  static const env::NavEnv nav;
  static const auto study = fixture::make_study(nav);
  auto cfg = std::make_shared<SessionConfig>();
  cfg->prototype = std::make_shared<env::NavEnv>();
  cfg->policy = study.policy;
  cfg->store = study.index;
  cfg->detector = study.knn;
  cfg->partition = pc::AxisPartition::user_owns(2, {0});
  cfg->initial_condition = initial;
  cfg->stop_predicate = pc::FailurePredicate::outside_workspace;
  cfg->first_seed = 40;
  return cfg;
}

json one(const std::vector<std::string>& msgs, std::size_t i = 0) {
  REQUIRE(msgs.size() > i);
  return json::parse(msgs[i]);
}

std::string user_action(double a, double b) {
  return json{{"version", 1}, {"type", "user_action"}, {"values", {a, b}}}.dump();
}

struct WsClient {
  asio::io_context ioc;
  beast::websocket::stream<tcp::socket> ws{ioc};

  explicit WsClient(unsigned short port) {
    tcp::resolver resolver(ioc);
    asio::connect(ws.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws.handshake("127.0.0.1", "/session");
  }
  void send(const std::string& s) { ws.write(asio::buffer(s)); }
  json read() {
    beast::flat_buffer buf;
    ws.read(buf);
    return json::parse(beast::buffers_to_string(buf.data()));
  }
  /// Next message of the given type, skipping others.
  json read_type(const std::string& type) {
    for (;;) {
      json j = read();
      if (j["type"] == type) return j;
    }
  }
};

json http_get(unsigned short port, const std::string& target, int* status = nullptr) {
  asio::io_context ioc;
  beast::tcp_stream stream(ioc);
  tcp::resolver resolver(ioc);
  stream.connect(resolver.resolve("127.0.0.1", std::to_string(port)));
  beast::http::request<beast::http::string_body> req{beast::http::verb::get, target, 11};
  req.set(beast::http::field::host, "127.0.0.1");
  beast::http::write(stream, req);
  beast::flat_buffer buf;
  beast::http::response<beast::http::string_body> res;
  beast::http::read(stream, buf, res);
  if (status) *status = static_cast<int>(res.result_int());
  beast::error_code ec;
  stream.socket().shutdown(tcp::socket::shutdown_both, ec);
  return res.result() == beast::http::status::ok ? json::parse(res.body()) : json();
}

}  // namespace

TEST_SUITE("service") {

TEST_CASE("wire parsing accepts the schema and rejects everything else") {
  auto ok = parse_client_message(user_action(0.5, -1));
  REQUIRE(std::holds_alternative<ClientMessage>(ok));
  CHECK(std::get<UserActionMsg>(std::get<ClientMessage>(ok)).values == std::vector<double>{0.5, -1});
  auto rs = parse_client_message(R"({"version":1,"type":"reset","seed":9})");
  CHECK(*std::get<ResetMsg>(std::get<ClientMessage>(rs)).seed == 9);
  auto sc = parse_client_message(R"({"version":1,"type":"set_condition","name":"STOP"})");
  CHECK(std::get<SetConditionMsg>(std::get<ClientMessage>(sc)).name == "STOP");

  auto code = [](const std::string& text) {
    auto r = parse_client_message(text);
    return std::holds_alternative<WireError>(r) ? std::get<WireError>(r).code : std::string("accepted");
  };
  CHECK(code("{not json") == "malformed");
  CHECK(code("[1,2]") == "malformed");
  CHECK(code(R"({"type":"reset"})") == "version_mismatch");
  CHECK(code(R"({"version":2,"type":"reset"})") == "version_mismatch");
  CHECK(code(R"({"version":1,"type":"fly"})") == "unknown_type");
  CHECK(code(R"({"version":1,"type":"user_action","values":"x"})") == "bad_field");
  CHECK(code(R"({"version":1,"type":"user_action","values":[1,"a"]})") == "bad_field");
  CHECK(code(R"({"version":1,"type":"set_condition"})") == "bad_field");
  CHECK(code(R"({"version":1,"type":"reset","seed":-1})") == "bad_field");
  const json e = json::parse(error_message({"unknown_type", "nope"}));
  CHECK(e["type"] == "error");
  CHECK(e["version"] == kWireVersion);
}

TEST_CASE("session lifecycle: hello, reset, ticks, done") {
  TeleopSession s("s1", nav_session());
  const json hello = json::parse(s.hello());
  CHECK(hello["type"] == "hello");
  CHECK(hello["user_dims"] == json::array({0}));
  CHECK(hello["condition"] == "IODA");
  CHECK(s.tick().empty());
  const json f0 = one(s.handle(R"({"version":1,"type":"reset","seed":3})"));
  CHECK(f0["type"] == "state");
  CHECK(f0["tick"] == 0);
  CHECK(s.running());
  const auto err = one(s.handle(R"({"version":1,"type":"set_condition","name":"RL"})"));
  CHECK(err["code"] == "episode_in_progress");
  int last = 0;
  std::vector<std::string> out;
  while (s.running()) {
    out = s.tick();
    const json f = one(out);
    CHECK(f["tick"] == last + 1);
    last = f["tick"];
  }
  const json done = one(out, 1);
  CHECK(done["type"] == "done");
  CHECK((done["reason"] == "goal" || done["reason"] == "timeout"));
  CHECK(s.tick().empty());
  const json h2 = one(s.handle(R"({"version":1,"type":"set_condition","name":"STOP"})"));
  CHECK(h2["condition"] == "STOP");
  CHECK(s.condition() == pc::ConditionKind::stop);
}

TEST_CASE("latest command wins and robot-owned entries are ignored") {
  TeleopSession s("s2", nav_session(pc::ConditionKind::rl));
  s.handle(R"({"version":1,"type":"reset","seed":1})");
  s.handle(user_action(-1, 0));
  s.handle(user_action(0.5, 1));
  s.tick();
  const auto& t = s.report().ticks.back();
  CHECK(t.user[0] == doctest::Approx(0.125));
  CHECK(t.user[1] == 0.0);
  CHECK(t.applied[1] == t.policy_action[1]);
  // The command persists until replaced.
  s.tick();
  CHECK(s.report().ticks.back().user[0] == doctest::Approx(0.125));
}

TEST_CASE("reset clears the mailbox and sessions replay through the executor") {
  TeleopSession s("s3", nav_session());
  s.handle(R"({"version":1,"type":"reset","seed":2})");
  s.handle(user_action(-1, 0));
  for (int i = 0; i < 30 && s.running(); ++i) s.tick();
  const auto logged = s.report();
  const auto again = pc::replay_episode(*nav_session()->prototype, s.setup(), logged);
  REQUIRE(again.ticks.size() == logged.ticks.size());
  for (std::size_t i = 0; i < logged.ticks.size(); ++i) CHECK(again.ticks[i] == logged.ticks[i]);
  CHECK(logged.imagined_ticks() > 0);
  s.handle(R"({"version":1,"type":"reset","seed":2})");
  CHECK_FALSE(s.mailbox().latest().has_value());
  s.tick();
  CHECK(s.report().ticks.back().user[0] == 0.0);
}

TEST_CASE("bad user action arity is reported") {
  TeleopSession s("s4", nav_session());
  const json e = one(s.handle(R"({"version":1,"type":"user_action","values":[1]})"));
  CHECK(e["code"] == "bad_field");
}

TEST_CASE("live server over WebSocket") {
  ServerConfig sc;
  sc.tick_hz = 50.0;
  TeleopServer server(sc, nav_session());
  server.start();
  const auto port = server.port();
  REQUIRE(port != 0);

  int status = 0;
  CHECK(http_get(port, "/healthz", &status)["status"] == "ok");
  CHECK(status == 200);
  http_get(port, "/nothing", &status);
  CHECK(status == 404);

  {
    WsClient c(port);
    const json hello = c.read();
    CHECK(hello["type"] == "hello");
    c.send(R"({"version":1,"type":"reset","seed":5})");
    json f = c.read_type("state");
    CHECK(f["tick"] == 0);
    const double x0 = f["state"][0];
    int prev = 0;
    for (int i = 0; i < 5; ++i) {
      f = c.read_type("state");
      CHECK(f["tick"] == prev + 1);
      prev = f["tick"];
    }
    const double x_before = f["state"][0];
    c.send(user_action(1, 0));
    bool moved = false;
    for (int i = 0; i < 3 && !moved; ++i) {
      f = c.read_type("state");
      CHECK(f["tick"] == prev + 1);
      prev = f["tick"];
      moved = f["state"][0].get<double>() > x_before + 0.2;
    }
    CHECK(moved);
    CHECK(x0 <= x_before + 1e-12);
    c.send(R"({"version":1,"type":"bogus"})");
    CHECK(c.read_type("error")["code"] == "unknown_type");
    CHECK(http_get(port, "/healthz")["sessions"] == 1);

    auto done = std::async(std::launch::async, [&c] { return c.read_type("done"); });
    server.stop();
    CHECK(done.get()["reason"] == "terminated");
  }
  CHECK_FALSE(server.running());
  CHECK(server.session_count() == 0);
  CHECK(server.closed_session_reports().size() == 1);
  CHECK_NOTHROW(server.stop());
}

TEST_CASE("a busy port makes start fail") {
  TeleopServer a({}, nav_session());
  a.start();
  ServerConfig sc;
  sc.port = a.port();
  TeleopServer b(sc, nav_session());
  CHECK_THROWS(b.start());
  a.stop();
}

}
