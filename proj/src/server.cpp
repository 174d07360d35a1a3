#include "cud/server.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <deque>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast.hpp>

#include "cud/event_store.hpp"
#include "cud/rng.hpp"

namespace cud::server {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace ws = beast::websocket;
using tcp = net::ip::tcp;
using nlohmann::json;
using game::GameError;
using game::GameSession;
using game::Phase;

// ---- config -----------------------------------------------------------------

void ServerConfig::validate() const {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos || colon == 0) throw std::invalid_argument("listen must be host:port");
  try {
    const int p = std::stoi(listen.substr(colon + 1));
    if (p < 0 || p > 65535) throw std::out_of_range("port");
  } catch (const std::logic_error&) {
    throw std::invalid_argument("listen port must be 0..65535");
  }
  if (storage.empty()) throw std::invalid_argument("storage path must not be empty");
  if (max_games_per_player < 0) throw std::invalid_argument("max_games_per_player must be >= 0");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  game.validate();
}

json to_json(const ServerConfig& c) {
  return {{"listen", c.listen},
          {"storage", c.storage.string()},
          {"seed", c.seed},
          {"max_games_per_player", c.max_games_per_player},
          {"threads", c.threads},
          {"game", game::to_json(c.game)}};
}

ServerConfig server_config_from_json(const json& j, const ServerConfig& base) {
  static const std::set<std::string> known = {"listen", "storage", "seed", "max_games_per_player", "threads", "game"};
  if (!j.is_object()) throw std::invalid_argument("server config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw std::invalid_argument("unknown server config key '" + it.key() + "'");
  ServerConfig c = base;
  try {
    c.listen = j.value("listen", c.listen);
    if (j.contains("storage")) c.storage = j.at("storage").get<std::string>();
    c.seed = j.value("seed", c.seed);
    c.max_games_per_player = j.value("max_games_per_player", c.max_games_per_player);
    c.threads = j.value("threads", c.threads);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad server config: ") + e.what());
  }
  if (j.contains("game")) c.game = game::game_config_from_json(j.at("game"), c.game);
  c.validate();
  return c;
}

void apply_env(ServerConfig& c, const std::function<const char*(const char*)>& getenv) {
  auto integer = [&](const char* key, int& dst) {
    if (const char* v = getenv(key)) {
      try {
        std::size_t used = 0;
        dst = std::stoi(v, &used);
        if (v[used] != '\0') throw std::invalid_argument(key);
      } catch (const std::logic_error&) {
        throw std::invalid_argument(std::string(key) + " must be an integer");
      }
    }
  };
  integer("CUD_SEATS", c.game.seats);
  integer("CUD_TAU", c.game.tau);
  integer("CUD_ROUND_SECONDS", c.game.round_seconds);
  integer("CUD_MIN_HUMANS", c.game.min_humans);
  if (const char* v = getenv("CUD_BOT_FILL")) c.game.bot_fill = game::parse_bot_fill(v);
  if (const char* v = getenv("CUD_STORAGE")) c.storage = v;
  if (const char* v = getenv("CUD_LISTEN")) c.listen = v;
  c.validate();
}

// ---- runtime ----------------------------------------------------------------

struct LiveSession;
class WsConn;

namespace {

json error_msg(const std::string& code, const std::string& message) {
  return {{"type", "error"}, {"code", code}, {"message", message}};
}

json tallies_json(const GameSession& g) {
  json t = json::object();
  for (int c = 0; c < g.candidates().size(); ++c) t[g.candidates().name(Candidate{c})] = g.tallies()[Candidate{c}];
  return t;
}

}  // namespace

struct Server::Impl {
  ServerConfig config;
  net::io_context ioc;
  tcp::acceptor acceptor;
  game::EventStore store;
  std::vector<std::thread> workers;

  std::mutex mu;  // guards the fields below
  std::map<std::string, std::shared_ptr<LiveSession>> sessions;
  std::vector<std::string> order;
  std::map<std::string, int> games_per_identity;
  std::uint64_t next_id = 1;

  explicit Impl(ServerConfig c)
      : config(std::move(c)), ioc(static_cast<int>(config.threads)), acceptor(ioc), store(config.storage) {}

  void accept();
  std::shared_ptr<LiveSession> create_session(const game::GameConfig& gc, std::optional<std::uint64_t> seed);
  std::shared_ptr<LiveSession> find(const std::string& id);
  http::response<http::string_body> handle(const http::request<http::string_body>& req);
  void on_message(const std::shared_ptr<WsConn>& conn, const std::string& text);
  void on_join(const std::shared_ptr<WsConn>& conn, const json& msg);
};

using ImplPtr = Server::Impl*;

// ---- websocket connection ----------------------------------------------------

class WsConn : public std::enable_shared_from_this<WsConn> {
 public:
  WsConn(tcp::socket&& s, ImplPtr impl) : ws_(std::move(s)), impl_(std::move(impl)) {}

  void accept(http::request<http::string_body> req) {
    req_ = std::move(req);
    ws_.set_option(ws::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req_, [self = shared_from_this()](beast::error_code ec) {
      if (!ec) self->read();
    });
  }

  void send(const json& msg) {
    net::post(ws_.get_executor(), [self = shared_from_this(), text = msg.dump()]() mutable {
      self->queue_.push_back(std::move(text));
      if (self->queue_.size() == 1) self->write();
    });
  }

  void bind(std::weak_ptr<LiveSession> s, std::size_t seat) {
    std::lock_guard lock(mu_);
    session_ = std::move(s);
    seat_ = seat;
  }
  std::pair<std::shared_ptr<LiveSession>, std::size_t> binding() const {
    std::lock_guard lock(mu_);
    return {session_.lock(), seat_};
  }

 private:
  void read() {
    ws_.async_read(buf_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return;  // closed; the seat stays and silence counts as keep
      const std::string text = beast::buffers_to_string(self->buf_.data());
      self->buf_.consume(self->buf_.size());
      self->impl_->on_message(self, text);
      self->read();
    });
  }

  void write() {
    ws_.text(true);
    ws_.async_write(net::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->queue_.clear();
        return;
      }
      self->queue_.pop_front();
      if (!self->queue_.empty()) self->write();
    });
  }

  ws::stream<beast::tcp_stream> ws_;
  http::request<http::string_body> req_;
  beast::flat_buffer buf_;
  std::deque<std::string> queue_;
  ImplPtr impl_;
  mutable std::mutex mu_;
  std::weak_ptr<LiveSession> session_;
  std::size_t seat_ = 0;
};

// ---- live session --------------------------------------------------------------

// All mutations run on the strand; `mu` lets HTTP handlers take consistent snapshots.
struct LiveSession : std::enable_shared_from_this<LiveSession> {
  net::strand<net::io_context::executor_type> strand;
  net::steady_timer timer;
  std::mutex mu;
  GameSession game;
  std::size_t persisted = 0;  // log events already in the store
  std::map<std::size_t, std::weak_ptr<WsConn>> conns;
  std::chrono::steady_clock::time_point deadline;
  Server::Impl* impl;

  LiveSession(Server::Impl& im, std::string id, const game::GameConfig& gc, std::uint64_t seed)
      : strand(net::make_strand(im.ioc)), timer(strand), game(std::move(id), gc, seed), impl(&im) {}

  void send(std::size_t seat, const json& msg) {
    auto it = conns.find(seat);
    if (it == conns.end()) return;
    if (auto c = it->second.lock()) c->send(msg);
  }

  json lobby_state(std::size_t seat) const {
    return {{"type", "lobby_state"},
            {"session", game.id()},
            {"seat", seat},
            {"joined", game.seats().size()},
            {"seats", game.config().seats},
            {"phase", std::string(game::to_string(game.phase()))}};
  }

  json game_start(std::size_t seat) const {
    const auto& s = game.seats()[seat];
    json prefs = json::array(), values = json::object();
    const auto v = game.values(seat);
    for (Candidate c : s.preference.ranking()) prefs.push_back(game.candidates().name(c));
    for (int c = 0; c < game.candidates().size(); ++c)
      values[game.candidates().name(Candidate{c})] = v[static_cast<std::size_t>(c)];
    return {{"type", "game_start"},         {"session", game.id()},
            {"seat", seat},                 {"candidates", game.candidates().names()},
            {"preferences", prefs},         {"values", values},
            {"tau", game.config().tau},     {"round_seconds", game.config().round_seconds}};
  }

  json round_state(std::size_t seat) const {
    const auto left = std::chrono::duration_cast<std::chrono::seconds>(deadline - std::chrono::steady_clock::now());
    return {{"type", "round_state"},
            {"t", game.t()},
            {"tallies", tallies_json(game)},
            {"your_ballot", game.candidates().name(game.ballots()[seat])},
            {"seconds_left", std::max<long long>(0, left.count())}};
  }

  json game_over(std::size_t seat) const {
    const auto m = game.metrics();
    return {{"type", "game_over"},
            {"winner", m.winner ? json(*m.winner) : json(nullptr)},
            {"converged", m.converged},
            {"points", m.rewards[seat]}};
  }

  std::vector<std::size_t> humans() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < game.seats().size(); ++i)
      if (!game.seats()[i].bot) out.push_back(i);
    return out;
  }

  // Persists and announces whatever the last command appended to the log.
  void after_change() {
    const auto& log = game.log();
    impl->store.append_all(game.id(), log, persisted);
    bool round_opened = false;
    for (std::size_t k = persisted; k < log.size(); ++k) {
      const std::string type = log[k].at("type");
      if (type == "joined") {
        for (auto& [seat, _] : conns) send(seat, lobby_state(seat));
      } else if (type == "started") {
        for (std::size_t h : humans()) send(h, game_start(h));
      } else if (type == "round_closed") {
        const auto& ev = log[k];
        for (std::size_t h : humans())
          send(h, {{"type", "round_result"}, {"t", ev.at("t")}, {"picked_change", ev.at("change")}});
      } else if (type == "round_opened") {
        round_opened = true;
      } else if (type == "finished") {
        timer.cancel();
        for (std::size_t h : humans()) send(h, game_over(h));
      }
    }
    persisted = log.size();
    if (!round_opened || game.phase() != Phase::Round) return;
    deadline = std::chrono::steady_clock::now() + std::chrono::seconds(game.config().round_seconds);
    for (std::size_t h : humans()) send(h, round_state(h));
    if (game.all_humans_acted()) {
      net::post(strand, [self = shared_from_this(), t = game.t()] { self->close_if(t); });
      return;
    }
    timer.expires_at(deadline);
    timer.async_wait([self = shared_from_this(), t = game.t()](beast::error_code ec) {
      if (!ec) self->close_if(t);
    });
  }

  void close_if(int t) {
    std::lock_guard lock(mu);
    if (game.phase() != Phase::Round || game.t() != t) return;
    game.close_round();
    after_change();
  }

  void start() {
    std::lock_guard lock(mu);
    if (game.phase() != Phase::Lobby) return;
    game.start();
    after_change();
  }

  void act(const std::shared_ptr<WsConn>& conn, std::size_t seat, const json& msg) {
    std::lock_guard lock(mu);
    try {
      const int round = msg.at("round").get<int>();
      std::optional<Candidate> to;
      if (msg.at("type") == "apply_change") {
        const std::string name = msg.at("candidate").get<std::string>();
        to = game.candidates().find(name);
        if (!to || !game.candidates().is_valid(*to)) throw GameError("bad_candidate", "unknown card '" + name + "'");
      }
      game.submit(seat, round, to);
      const auto& a = game.actions().back();
      conn->send({{"type", "ack"},
                  {"round", round},
                  {"action", a.to ? "change" : "keep"},
                  {"candidate", a.to ? json(game.candidates().name(*a.to)) : json(nullptr)}});
      after_change();
      if (game.all_humans_acted())
        net::post(strand, [self = shared_from_this(), t = game.t()] { self->close_if(t); });
    } catch (const GameError& e) {
      conn->send(error_msg(e.code(), e.what()));
    } catch (const json::exception& e) {
      conn->send(error_msg("bad_message", e.what()));
    }
  }

  // Seats a new player or reattaches a known token to its seat.
  void join(const std::shared_ptr<WsConn>& conn, const std::string& name, const std::string& token) {
    std::lock_guard lock(mu);
    try {
      std::size_t seat;
      bool fresh = false;
      if (auto known = game.seat_of(token)) {
        seat = *known;
      } else {
        {
          std::lock_guard hub(impl->mu);
          const int played = impl->games_per_identity[GameSession::hash_token(token)];
          if (impl->config.max_games_per_player > 0 && played >= impl->config.max_games_per_player)
            throw GameError("game_limit", "this player reached the per-player game limit");
        }
        // conns must know the seat before join() may start the game
        seat = game.seats().size();
        conns[seat] = conn;
        try {
          game.join(name, token);
        } catch (...) {
          conns.erase(seat);
          throw;
        }
        fresh = true;
        std::lock_guard hub(impl->mu);
        ++impl->games_per_identity[GameSession::hash_token(token)];
      }
      conns[seat] = conn;
      conn->bind(weak_from_this(), seat);
      if (fresh) {
        after_change();  // announces the join, and the start if it triggered one
        return;
      }
      switch (game.phase()) {
        case Phase::Lobby: conn->send(lobby_state(seat)); break;
        case Phase::Round:
          conn->send(game_start(seat));
          conn->send(round_state(seat));
          break;
        case Phase::Finished: conn->send(game_over(seat)); break;
      }
    } catch (const GameError& e) {
      conn->send(error_msg(e.code(), e.what()));
    }
  }

  json summary() {
    std::lock_guard lock(mu);
    json j = {{"id", game.id()},
              {"phase", std::string(game::to_string(game.phase()))},
              {"seats", game.config().seats},
              {"joined", game.seats().size()},
              {"humans", game.human_count()},
              {"t", game.t()},
              {"config", game::to_json(game.config())}};
    if (game.phase() != Phase::Lobby) j["tallies"] = tallies_json(game);
    if (game.phase() == Phase::Finished) j["metrics"] = game::to_json(game.metrics());
    return j;
  }
};

// ---- HTTP --------------------------------------------------------------------------

namespace {

class HttpConn : public std::enable_shared_from_this<HttpConn> {
 public:
  HttpConn(tcp::socket&& s, ImplPtr impl) : stream_(std::move(s)), impl_(std::move(impl)) {}

  void run() {
    net::dispatch(stream_.get_executor(), [self = shared_from_this()] { self->read(); });
  }

 private:
  void read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buf_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->on_read(ec);
    });
  }

  void on_read(beast::error_code ec) {
    if (ec) {
      beast::error_code ignored;
      stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
      return;
    }
    if (ws::is_upgrade(req_)) {
      stream_.expires_never();
      std::make_shared<WsConn>(stream_.release_socket(), impl_)->accept(std::move(req_));
      return;
    }
    auto res = std::make_shared<http::response<http::string_body>>(impl_->handle(req_));
    res->keep_alive(req_.keep_alive());
    res->prepare_payload();
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (!res->keep_alive()) {
        beast::error_code ignored;
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
        return;
      }
      self->read();
    });
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buf_;
  http::request<http::string_body> req_;
  ImplPtr impl_;
};

http::response<http::string_body> reply(http::status st, const json& body, unsigned version) {
  http::response<http::string_body> res{st, version};
  res.set(http::field::content_type, "application/json");
  res.body() = body.dump() + "\n";
  return res;
}

std::vector<std::string> split_path(std::string_view target) {
  target = target.substr(0, target.find('?'));
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < target.size()) {
    const auto j = target.find('/', i);
    const auto part = target.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i);
    if (!part.empty()) parts.emplace_back(part);
    if (j == std::string_view::npos) break;
    i = j + 1;
  }
  return parts;
}

}  // namespace

void Server::Impl::accept() {
  acceptor.async_accept(net::make_strand(ioc), [self = this](beast::error_code ec, tcp::socket s) {
    if (ec == net::error::operation_aborted) return;
    if (!ec) std::make_shared<HttpConn>(std::move(s), self)->run();
    self->accept();
  });
}

std::shared_ptr<LiveSession> Server::Impl::create_session(const game::GameConfig& gc, std::optional<std::uint64_t> seed) {
  std::lock_guard lock(mu);
  std::string id;
  do {
    char buf[32];
    std::snprintf(buf, sizeof buf, "g%llu-%06llx", static_cast<unsigned long long>(next_id),
                  static_cast<unsigned long long>(derive_seed(config.seed, {next_id}) & 0xffffff));
    ++next_id;
    id = buf;
  } while (sessions.count(id) || store.exists(id));
  store.create(id);
  auto s = std::make_shared<LiveSession>(*this, id, gc, seed.value_or(derive_seed(config.seed, {hash_string(id)})));
  store.append_all(id, s->game.log());
  s->persisted = s->game.log().size();
  sessions[id] = s;
  order.push_back(id);
  return s;
}

std::shared_ptr<LiveSession> Server::Impl::find(const std::string& id) {
  std::lock_guard lock(mu);
  auto it = sessions.find(id);
  return it == sessions.end() ? nullptr : it->second;
}

void Server::Impl::on_message(const std::shared_ptr<WsConn>& conn, const std::string& text) {
  json msg;
  try {
    msg = json::parse(text);
    if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string())
      throw std::invalid_argument("messages are JSON objects with a string 'type'");
  } catch (const std::exception& e) {
    conn->send(error_msg("bad_message", e.what()));
    return;
  }
  const std::string type = msg["type"];
  if (type == "join") {
    on_join(conn, msg);
  } else if (type == "apply_change" || type == "keep") {
    auto [session, seat] = conn->binding();
    if (!session) {
      conn->send(error_msg("not_joined", "join a session first"));
      return;
    }
    net::post(session->strand, [session, seat = seat, conn, msg] { session->act(conn, seat, msg); });
  } else {
    conn->send(error_msg("bad_message", "unknown message type '" + type + "'"));
  }
}

void Server::Impl::on_join(const std::shared_ptr<WsConn>& conn, const json& msg) {
  std::string name, token, wanted;
  try {
    name = msg.value("name", std::string("player"));
    token = msg.at("token").get<std::string>();
    wanted = msg.value("session", std::string());
  } catch (const json::exception&) {
    conn->send(error_msg("bad_message", "join needs a string token"));
    return;
  }
  if (token.empty()) {
    conn->send(error_msg("bad_token", "join needs a non-empty token"));
    return;
  }
  std::shared_ptr<LiveSession> target;
  if (!wanted.empty()) {
    target = find(wanted);
    if (!target) {
      conn->send(error_msg("no_session", "no live session '" + wanted + "'"));
      return;
    }
  } else {
    // prefer a running game this token already sits in, then any open lobby
    std::vector<std::shared_ptr<LiveSession>> live;
    {
      std::lock_guard lock(mu);
      for (const auto& id : order) live.push_back(sessions[id]);
    }
    for (auto& s : live) {
      std::lock_guard lock(s->mu);
      if (s->game.phase() != Phase::Finished && s->game.seat_of(token)) {
        target = s;
        break;
      }
    }
    for (auto& s : live) {
      if (target) break;
      std::lock_guard lock(s->mu);
      if (s->game.phase() == Phase::Lobby && s->game.config().bot_fill != game::BotFill::BotsOnly &&
          static_cast<int>(s->game.seats().size()) < s->game.config().seats)
        target = s;
    }
    if (!target) target = create_session(config.game, std::nullopt);
  }
  net::post(target->strand, [target, conn, name, token] { target->join(conn, name, token); });
}

http::response<http::string_body> Server::Impl::handle(const http::request<http::string_body>& req) {
  const unsigned v = req.version();
  const auto path = split_path(std::string_view(req.target().data(), req.target().size()));
  const auto method = req.method();
  try {
    if (path.size() == 1 && path[0] == "health" && method == http::verb::get)
      return reply(http::status::ok, {{"status", "ready"}}, v);
    if (path.empty() || path[0] != "sessions") return reply(http::status::not_found, {{"error", "not found"}}, v);

    if (path.size() == 1 && method == http::verb::post) {
      json body = req.body().empty() ? json::object() : json::parse(req.body());
      if (!body.is_object()) throw std::invalid_argument("body must be a JSON object");
      for (auto it = body.begin(); it != body.end(); ++it)
        if (it.key() != "config" && it.key() != "seed") throw std::invalid_argument("unknown key '" + it.key() + "'");
      const game::GameConfig gc =
          body.contains("config") ? game::game_config_from_json(body["config"], config.game) : config.game;
      std::optional<std::uint64_t> seed;
      if (body.contains("seed")) seed = body["seed"].get<std::uint64_t>();
      auto s = create_session(gc, seed);
      if (gc.bot_fill == game::BotFill::BotsOnly) net::post(s->strand, [s] { s->start(); });
      return reply(http::status::created, {{"id", s->game.id()}, {"seed", s->game.seed()}}, v);
    }
    if (path.size() == 1 && method == http::verb::get) {
      json out = json::array();
      for (const auto& id : store.list()) {
        if (auto s = find(id)) {
          out.push_back(s->summary());
        } else {
          out.push_back({{"id", id}, {"phase", "stored"}});
        }
      }
      return reply(http::status::ok, out, v);
    }

    const std::string id = path.size() >= 2 ? path[1] : "";
    if (!game::EventStore::valid_id(id) || !store.exists(id))
      return reply(http::status::not_found, {{"error", "no session '" + id + "'"}}, v);

    if (path.size() == 2 && method == http::verb::get) {
      if (auto s = find(id)) return reply(http::status::ok, s->summary(), v);
      const GameSession g = GameSession::replay(store.load(id));
      json j = {{"id", id}, {"phase", std::string(game::to_string(g.phase()))}, {"t", g.t()}};
      if (g.phase() == Phase::Finished) j["metrics"] = game::to_json(g.metrics());
      return reply(http::status::ok, j, v);
    }
    if (path.size() == 3 && path[2] == "start" && method == http::verb::post) {
      auto s = find(id);
      if (!s) return reply(http::status::conflict, {{"error", "session is not live"}}, v);
      {
        std::lock_guard lock(s->mu);
        if (s->game.phase() != Phase::Lobby) return reply(http::status::conflict, {{"error", "already started"}}, v);
        if (s->game.config().bot_fill == game::BotFill::None &&
            static_cast<int>(s->game.seats().size()) < s->game.config().seats)
          return reply(http::status::conflict, {{"error", "human-only game is not full"}}, v);
      }
      net::post(s->strand, [s] { s->start(); });
      return reply(http::status::accepted, {{"id", id}}, v);
    }
    if (path.size() == 3 && method == http::verb::get) {
      if (path[2] == "log") {
        http::response<http::string_body> res{http::status::ok, v};
        res.set(http::field::content_type, "application/x-ndjson");
        std::string body;
        for (const auto& ev : store.load(id)) body += ev.dump() + "\n";
        res.body() = std::move(body);
        return res;
      }
      if (path[2] == "metrics" || path[2] == "replay") {
        std::vector<json> events;
        try {
          events = store.load(id);
        } catch (const game::LogParseError& e) {
          return reply(http::status::unprocessable_entity, {{"ok", false}, {"error", e.what()}}, v);
        }
        try {
          const GameSession g = GameSession::replay(events);
          if (path[2] == "metrics") {
            if (g.phase() != Phase::Finished)
              return reply(http::status::conflict, {{"error", "the game has not finished"}}, v);
            return reply(http::status::ok, game::to_json(g.metrics()), v);
          }
          json j = {{"ok", true}, {"events", events.size()}, {"phase", std::string(game::to_string(g.phase()))}};
          if (g.phase() == Phase::Finished) j["metrics"] = game::to_json(g.metrics());
          return reply(http::status::ok, j, v);
        } catch (const game::ReplayError& e) {
          return reply(http::status::unprocessable_entity, {{"ok", false}, {"error", e.what()}}, v);
        }
      }
    }
    return reply(http::status::not_found, {{"error", "not found"}}, v);
  } catch (const json::exception& e) {
    return reply(http::status::bad_request, {{"error", e.what()}}, v);
  } catch (const std::invalid_argument& e) {
    return reply(http::status::bad_request, {{"error", e.what()}}, v);
  } catch (const std::exception& e) {
    return reply(http::status::internal_server_error, {{"error", e.what()}}, v);
  }
}

// ---- Server ----------------------------------------------------------------------

Server::Server(ServerConfig config) {
  config.validate();
  impl_ = std::make_unique<Impl>(std::move(config));
}

Server::~Server() {
  stop();
  for (auto& t : impl_->workers)
    if (t.joinable()) t.join();
}

unsigned short Server::start() {
  const auto colon = impl_->config.listen.rfind(':');
  const auto host = impl_->config.listen.substr(0, colon);
  const auto port = static_cast<unsigned short>(std::stoi(impl_->config.listen.substr(colon + 1)));
  tcp::resolver resolver(impl_->ioc);
  const auto ep = resolver.resolve(host, std::to_string(port))->endpoint();
  auto& a = impl_->acceptor;
  a.open(ep.protocol());
  a.set_option(net::socket_base::reuse_address(true));
  a.bind(ep);
  a.listen(net::socket_base::max_listen_connections);
  impl_->accept();
  return a.local_endpoint().port();
}

unsigned short Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::run() {
  for (unsigned i = 1; i < impl_->config.threads; ++i) impl_->workers.emplace_back([impl = impl_.get()] { impl->ioc.run(); });
  impl_->ioc.run();
  for (auto& t : impl_->workers)
    if (t.joinable()) t.join();
  impl_->workers.clear();
}

void Server::stop() { impl_->ioc.stop(); }

}  // namespace cud::server
