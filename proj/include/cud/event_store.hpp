#pragma once

#include <filesystem>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cud::game {

/// A stored log that cannot be read back as JSON lines.
class LogParseError : public std::runtime_error {
 public:
  LogParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Parses one event per line. Blank lines are skipped.
std::vector<nlohmann::json> read_event_log(std::istream& in);
std::vector<nlohmann::json> read_event_log_file(const std::filesystem::path& path);

/// Append-only JSONL storage, one file per session plus index.jsonl.
/// Safe to share between threads.
class EventStore {
 public:
  explicit EventStore(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path path_of(const std::string& id) const;

  /// Registers a new session; throws std::invalid_argument on a bad or taken id.
  void create(const std::string& id);
  void append(const std::string& id, const nlohmann::json& event);
  /// Appends every event from `from` onwards.
  void append_all(const std::string& id, const std::vector<nlohmann::json>& events, std::size_t from = 0);
  bool exists(const std::string& id) const;
  std::vector<nlohmann::json> load(const std::string& id) const;
  /// Session ids in creation order.
  std::vector<std::string> list() const;

  static bool valid_id(const std::string& id);

 private:
  std::filesystem::path dir_;
  mutable std::mutex mu_;
};

}  // namespace cud::game
