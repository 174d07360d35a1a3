#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <thread>

#include <unistd.h>

#include <boost/asio.hpp>
#include <boost/beast.hpp>

#include "cud/server.hpp"

using namespace cud;
using namespace cud::server;
using nlohmann::json;

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

namespace {

struct Reply {
  int status = 0;
  std::string body;
  json j() const { return json::parse(body); }
};

Reply request(unsigned short port, http::verb verb, const std::string& target, const std::string& body = "") {
  net::io_context ioc;
  beast::tcp_stream stream(ioc);
  stream.connect(tcp::endpoint(net::ip::make_address("127.0.0.1"), port));
  http::request<http::string_body> req{verb, target, 11};
  req.set(http::field::host, "localhost");
  req.body() = body;
  req.prepare_payload();
  http::write(stream, req);
  beast::flat_buffer buf;
  http::response<http::string_body> res;
  http::read(stream, buf, res);
  beast::error_code ec;
  stream.socket().shutdown(tcp::socket::shutdown_both, ec);
  return {static_cast<int>(res.result_int()), res.body()};
}

class Client {
 public:
  explicit Client(unsigned short port) : ws_(ioc_) {
    beast::get_lowest_layer(ws_).connect(tcp::endpoint(net::ip::make_address("127.0.0.1"), port));
    ws_.handshake("localhost", "/ws");
  }
  void send(const json& j) { ws_.write(net::buffer(j.dump())); }
  void send_raw(const std::string& s) { ws_.write(net::buffer(s)); }
  json next() {
    beast::flat_buffer buf;
    ws_.read(buf);
    return json::parse(beast::buffers_to_string(buf.data()));
  }
  /// Skips messages until one of `type` arrives.
  json until(const std::string& type) {
    for (;;) {
      json m = next();
      seen.push_back(m);
      if (m["type"] == type) return m;
    }
  }
  void close() { ws_.close(websocket::close_code::normal); }
  std::vector<json> seen;

 private:
  net::io_context ioc_;
  websocket::stream<beast::tcp_stream> ws_;
};

struct Running {
  explicit Running(ServerConfig cfg) : server(std::move(cfg)) {
    port = server.start();
    thread = std::thread([this] { server.run(); });
  }
  ~Running() {
    server.stop();
    thread.join();
  }
  Server server;
  unsigned short port = 0;
  std::thread thread;
};

std::filesystem::path temp_dir(const std::string& tag) {
  auto p = std::filesystem::temp_directory_path() / ("cud_server_test_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  return p;
}

Reply wait_for(unsigned short port, const std::string& target, int status) {
  Reply r;
  for (int i = 0; i < 500; ++i) {
    r = request(port, http::verb::get, target);
    if (r.status == status) return r;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  return r;
}

}  // namespace

TEST_CASE("config file and environment overrides") {
  ServerConfig c = server_config_from_json(json{{"listen", "0.0.0.0:9000"}, {"game", {{"tau", 6}}}});
  CHECK(c.listen == "0.0.0.0:9000");
  CHECK(c.game.tau == 6);
  CHECK(c.game.seats == 8);
  std::map<std::string, std::string> env = {{"CUD_SEATS", "4"},       {"CUD_TAU", "3"},
                                            {"CUD_ROUND_SECONDS", "5"}, {"CUD_BOT_FILL", "bots_only"},
                                            {"CUD_STORAGE", "/tmp/x"},  {"CUD_LISTEN", "127.0.0.1:0"}};
  auto get = [&](const char* k) -> const char* {
    auto it = env.find(k);
    return it == env.end() ? nullptr : it->second.c_str();
  };
  c.game.min_humans = 2;
  apply_env(c, get);
  CHECK(c.game.seats == 4);
  CHECK(c.game.tau == 3);
  CHECK(c.game.round_seconds == 5);
  CHECK(c.game.bot_fill == game::BotFill::BotsOnly);
  CHECK(c.storage == "/tmp/x");
  CHECK(c.listen == "127.0.0.1:0");
  env["CUD_TAU"] = "ten";
  CHECK_THROWS_AS(apply_env(c, get), std::invalid_argument);
  CHECK_THROWS_AS(server_config_from_json(json{{"port", 1}}), std::invalid_argument);
  CHECK_THROWS_AS(server_config_from_json(json{{"listen", "nohost"}}), std::invalid_argument);
  CHECK(server_config_from_json(to_json(c)).listen == c.listen);
}

TEST_CASE("admin endpoints and a bot-only game") {
  const auto dir = temp_dir("admin");
  ServerConfig cfg;
  cfg.listen = "127.0.0.1:0";
  cfg.storage = dir;
  Running srv(cfg);
  const auto port = srv.port;

  auto health = request(port, http::verb::get, "/health");
  CHECK(health.status == 200);
  CHECK(health.j()["status"] == "ready");
  CHECK(request(port, http::verb::get, "/nothing").status == 404);
  CHECK(request(port, http::verb::get, "/sessions/nope/metrics").status == 404);
  CHECK(request(port, http::verb::post, "/sessions", "{\"config\":{\"tau\":-2}}").status == 400);
  CHECK(request(port, http::verb::post, "/sessions", "not json").status == 400);

  auto created = request(port, http::verb::post, "/sessions",
                         json{{"config", {{"bot_fill", "bots_only"}, {"round_seconds", 0}}}, {"seed", 5}}.dump());
  REQUIRE(created.status == 201);
  const std::string id = created.j()["id"];

  auto metrics = wait_for(port, "/sessions/" + id + "/metrics", 200);
  REQUIRE(metrics.status == 200);
  CHECK(metrics.j()["converged"] == true);
  CHECK(metrics.j()["rewards"].size() == 8u);

  auto replay = request(port, http::verb::get, "/sessions/" + id + "/replay");
  CHECK(replay.status == 200);
  CHECK(replay.j()["ok"] == true);
  CHECK(replay.j()["metrics"] == metrics.j());

  auto log = request(port, http::verb::get, "/sessions/" + id + "/log");
  CHECK(log.status == 200);
  CHECK(log.body.find("\"type\":\"finished\"") != std::string::npos);

  auto one = request(port, http::verb::get, "/sessions/" + id);
  CHECK(one.j()["phase"] == "finished");
  auto list = request(port, http::verb::get, "/sessions");
  REQUIRE(list.j().size() == 1u);
  CHECK(list.j()[0]["id"] == id);

  // a lobby has no metrics yet
  auto lobby = request(port, http::verb::post, "/sessions", "{}");
  const std::string lid = lobby.j()["id"];
  CHECK(request(port, http::verb::get, "/sessions/" + lid + "/metrics").status == 409);
  CHECK(request(port, http::verb::get, "/sessions/" + lid + "/replay").j()["phase"] == "lobby");

  std::filesystem::remove_all(dir);
}

TEST_CASE("websocket game between two humans and a bot") {
  const auto dir = temp_dir("ws");
  ServerConfig cfg;
  cfg.listen = "127.0.0.1:0";
  cfg.storage = dir;
  cfg.max_games_per_player = 1;
  Running srv(cfg);
  const auto port = srv.port;

  const json gc = {{"seats", 3}, {"min_humans", 2}, {"tau", 4}, {"round_seconds", 5}};
  auto created = request(port, http::verb::post, "/sessions", json{{"config", gc}, {"seed", 3}}.dump());
  REQUIRE(created.status == 201);
  const std::string id = created.j()["id"];

  Client a(port), b(port);
  a.send({{"type", "keep"}, {"round", 4}});
  CHECK(a.next()["code"] == "not_joined");
  a.send_raw("{oops");
  CHECK(a.next()["code"] == "bad_message");

  a.send({{"type", "join"}, {"name", "ann"}, {"token", "tok-a"}, {"session", id}});
  const json la = a.until("lobby_state");
  CHECK(la["seat"] == 0);
  CHECK(la["seats"] == 3);
  CHECK_FALSE(la.contains("bots"));

  b.send({{"type", "join"}, {"name", "bob"}, {"token", "tok-b"}, {"session", id}});
  json start_a = a.until("game_start");
  json start_b = b.until("game_start");
  CHECK(start_a["tau"] == 4);
  CHECK(start_a["preferences"].size() == 5u);
  CHECK(start_a["values"][start_a["preferences"][0].get<std::string>()] == 100);
  CHECK(start_a["values"][start_a["preferences"][4].get<std::string>()] == 20);

  // a reconnect with the same token gets its seat back
  a.close();
  Client a2(port);
  a2.send({{"type", "join"}, {"name", "ann"}, {"token", "tok-a"}, {"session", id}});
  CHECK(a2.until("game_start")["preferences"] == start_a["preferences"]);

  json over_a, over_b;
  int rounds = 0;
  json rs = a2.until("round_state");
  for (;;) {
    b.until("round_state");
    CHECK(rs["tallies"].size() == 5u);
    CHECK(rs.contains("your_ballot"));
    CHECK(rs["seconds_left"].get<int>() <= 5);
    const int t = rs["t"];
    CHECK(t == 4 - rounds);
    a2.send({{"type", "keep"}, {"round", t + 1}});
    CHECK(a2.until("error")["code"] == "wrong_round");
    // ann moves to her second card once, then keeps; bob always keeps
    if (rounds == 0)
      a2.send({{"type", "apply_change"}, {"round", t}, {"candidate", start_a["preferences"][1]}});
    else
      a2.send({{"type", "keep"}, {"round", t}});
    const json ack = a2.until("ack");
    CHECK(ack["round"] == t);
    CHECK(ack["action"] == (rounds == 0 ? "change" : "keep"));
    a2.send({{"type", "keep"}, {"round", t}});
    CHECK(a2.until("error")["code"] == "already_acted");
    b.send({{"type", "keep"}, {"round", t}});
    const json ra = a2.until("round_result");
    CHECK(ra["t"] == t);
    CHECK(ra.contains("picked_change"));
    b.until("round_result");
    ++rounds;
    const json nxt = a2.next();
    if (nxt["type"] == "game_over") {
      over_a = nxt;
      over_b = b.until("game_over");
      break;
    }
    REQUIRE(nxt["type"] == "round_state");
    rs = nxt;
  }
  CHECK(rounds <= 4);
  CHECK(over_a.contains("winner"));
  CHECK(over_a["points"].is_number_integer());
  if (over_a["converged"] == false) CHECK(over_a["points"] == 0);

  auto metrics = wait_for(port, "/sessions/" + id + "/metrics", 200);
  REQUIRE(metrics.status == 200);
  CHECK(metrics.j()["rewards"][0] == over_a["points"]);
  CHECK(metrics.j()["rewards"][1] == over_b["points"]);
  CHECK(request(port, http::verb::get, "/sessions/" + id + "/replay").j()["ok"] == true);

  // one game per player on this server
  Client c(port);
  c.send({{"type", "join"}, {"name", "ann"}, {"token", "tok-a"}});
  CHECK(c.until("error")["code"] == "game_limit");

  std::filesystem::remove_all(dir);
}
