#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "cud/game.hpp"

namespace cud::server {

struct ServerConfig {
  std::string listen = "127.0.0.1:8080";  // host:port; port 0 picks a free one
  std::filesystem::path storage = "cud-data";
  std::uint64_t seed = 1;                 // session seeds derive from this and the session id
  int max_games_per_player = 15;          // per token, over the server's lifetime; 0 = unlimited
  unsigned threads = 1;
  game::GameConfig game;                  // defaults for new sessions

  /// Throws std::invalid_argument.
  void validate() const;
};

nlohmann::json to_json(const ServerConfig& c);
ServerConfig server_config_from_json(const nlohmann::json& j, const ServerConfig& base = {});
/// CUD_SEATS, CUD_TAU, CUD_ROUND_SECONDS, CUD_BOT_FILL, CUD_MIN_HUMANS,
/// CUD_STORAGE, CUD_LISTEN. `getenv` is injectable for tests.
void apply_env(ServerConfig& c, const std::function<const char*(const char*)>& getenv);

/// HTTP admin endpoints and the websocket game channel on one port.
class Server {
 public:
  explicit Server(ServerConfig config);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts accepting. Returns the bound port.
  unsigned short start();
  /// Runs the event loop on the configured threads until stop().
  void run();
  void stop();
  unsigned short port() const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace cud::server
