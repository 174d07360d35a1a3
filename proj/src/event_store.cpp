#include "cud/event_store.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace cud::game {

using nlohmann::json;
namespace fs = std::filesystem;

std::vector<json> read_event_log(std::istream& in) {
  std::vector<json> out;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json ev;
    try {
      ev = json::parse(line);
    } catch (const json::parse_error& e) {
      throw LogParseError(no, std::string("not valid JSON: ") + e.what());
    }
    if (!ev.is_object()) throw LogParseError(no, "event must be a JSON object");
    if (!ev.contains("type") || !ev["type"].is_string()) throw LogParseError(no, "event has no type");
    if (!ev.contains("seq") || !ev["seq"].is_number_unsigned()) throw LogParseError(no, "event has no seq");
    out.push_back(std::move(ev));
  }
  return out;
}

std::vector<json> read_event_log_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_event_log(in);
}

EventStore::EventStore(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

bool EventStore::valid_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')) return false;
  return id != "index";
}

fs::path EventStore::path_of(const std::string& id) const {
  if (!valid_id(id)) throw std::invalid_argument("bad session id '" + id + "'");
  return dir_ / (id + ".jsonl");
}

void EventStore::create(const std::string& id) {
  const fs::path p = path_of(id);
  std::lock_guard lock(mu_);
  if (fs::exists(p)) throw std::invalid_argument("session '" + id + "' already exists");
  std::ofstream(p, std::ios::app);
  std::ofstream idx(dir_ / "index.jsonl", std::ios::app);
  idx << json{{"id", id}}.dump() << '\n';
  if (!idx) throw std::runtime_error("cannot write the session index");
}

void EventStore::append(const std::string& id, const json& event) { append_all(id, {event}); }

void EventStore::append_all(const std::string& id, const std::vector<json>& events, std::size_t from) {
  const fs::path p = path_of(id);
  std::lock_guard lock(mu_);
  std::ofstream out(p, std::ios::app);
  for (std::size_t i = from; i < events.size(); ++i) out << events[i].dump() << '\n';
  out.flush();
  if (!out) throw std::runtime_error("cannot append to " + p.string());
}

bool EventStore::exists(const std::string& id) const { return valid_id(id) && fs::exists(path_of(id)); }

std::vector<json> EventStore::load(const std::string& id) const {
  const fs::path p = path_of(id);
  std::lock_guard lock(mu_);
  if (!fs::exists(p)) throw std::invalid_argument("no session '" + id + "'");
  return read_event_log_file(p);
}

std::vector<std::string> EventStore::list() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  std::ifstream in(dir_ / "index.jsonl");
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line).at("id").get<std::string>());
    } catch (const json::exception&) {
      // a torn index line from a crash; the session file is still there
    }
  }
  return out;
}

}  // namespace cud::game
