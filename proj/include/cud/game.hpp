#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cud/rng.hpp"
#include "cud/types.hpp"

namespace cud::game {

/// Rejected command. `code` is a short machine-readable tag sent to clients.
class GameError : public std::runtime_error {
 public:
  GameError(std::string code, const std::string& what) : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

/// A stored event log that cannot be replayed.
class ReplayError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class BotFill { None, Mixed, BotsOnly };

std::string_view to_string(BotFill f);
BotFill parse_bot_fill(std::string_view s);

struct GameConfig {
  int seats = 8;
  std::vector<std::string> cards = {"cat", "penguin", "racoon", "boar", "owl"};
  int tau = 10;
  int round_seconds = 15;
  BotFill bot_fill = BotFill::Mixed;
  int min_humans = 6;  // mixed mode starts once this many humans joined
  /// Orders (card names, best first) that seats draw from uniformly.
  /// Empty: every permutation of the cards.
  std::vector<std::vector<std::string>> preference_pool;
  /// When set, seat i receives profile[i] instead of a draw.
  std::optional<std::vector<std::vector<std::string>>> profile;

  int sigma() const { return seats; }
  /// Throws std::invalid_argument.
  void validate() const;
};

nlohmann::json to_json(const GameConfig& c);
/// Missing keys keep the values in `base`.
GameConfig game_config_from_json(const nlohmann::json& j, const GameConfig& base = {});

/// round(100 * (m - r + 1) / m) for a converged game, 0 otherwise. r is 1-based.
int reward(int rank, int m, bool converged);

struct Flags {
  bool oa = false;  // prefers every current leader over the target
  bool ia = false;  // some strictly preferred candidate has strictly more votes
  bool any() const { return oa || ia; }
  friend bool operator==(const Flags&, const Flags&) = default;
};

/// Flags for a change to `target`, judged on the tallies the voter saw.
Flags classify_action(const Preference& pref, const ScoreVector& tallies, Candidate target);

enum class Phase { Lobby, Round, Finished };
std::string_view to_string(Phase p);

struct Seat {
  std::string name;
  std::string identity;  // hashed join token; empty for bots
  bool bot = false;
  Preference preference;
};

struct ActionRecord {
  std::size_t seat = 0;
  int round = 0;                  // the t of the round
  std::optional<Candidate> to;    // empty: keep
  Flags flags;
};

struct RoundRecord {
  int t = 0;                       // remaining rounds when the round opened
  ScoreVector tallies;             // as broadcast at round start
  std::vector<std::size_t> applicants;
  std::optional<std::size_t> picked;
  std::optional<Candidate> from, to;
};

struct GameMetrics {
  bool converged = false;
  std::optional<std::string> winner;
  int rounds_used = 0;
  double avg_reward = 0.0;
  std::vector<int> rewards;        // per seat
  std::optional<int> por;          // N/A on the default outcome
  int oa_actions = 0;
  int ia_actions = 0;
  int irrational_actions = 0;      // actions with at least one flag
  int changes = 0;

  friend bool operator==(const GameMetrics&, const GameMetrics&) = default;
};

nlohmann::json to_json(const GameMetrics& m);
GameMetrics metrics_from_json(const nlohmann::json& j);

/// One CUD game as an event-sourced state machine. Every accepted command is
/// appended to the log as a JSON event, and replaying the log through the same
/// transition code rebuilds the state, re-deriving and checking every draw.
class GameSession {
 public:
  GameSession(std::string id, GameConfig config, std::uint64_t seed);

  /// Seats a human; returns the seat index. May start the game.
  std::size_t join(const std::string& name, const std::string& token);
  /// Starts now, filling empty seats with bots unless the fill mode is None.
  void start();
  bool ready_to_start() const;

  /// Records a human's choice for the current round. `to` empty (or equal to
  /// the current ballot) means keep.
  Flags submit(std::size_t seat, int round, std::optional<Candidate> to);
  bool all_humans_acted() const;
  /// Draws one applicant, applies the change and opens the next round or finishes.
  const RoundRecord& close_round();

  // ---- queries ----
  const std::string& id() const { return id_; }
  const GameConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }
  Phase phase() const { return phase_; }
  int t() const { return t_; }
  const CandidateSet& candidates() const { return candidates_; }
  const std::vector<Seat>& seats() const { return seats_; }
  std::size_t human_count() const;
  const BallotProfile& ballots() const { return ballots_; }
  const ScoreVector& tallies() const { return tallies_; }
  const ScoreVector& truthful_tallies() const { return truthful_; }
  std::optional<Candidate> winner() const { return winner_; }
  const std::vector<RoundRecord>& rounds() const { return rounds_; }
  const std::vector<ActionRecord>& actions() const { return actions_; }
  bool has_acted(std::size_t seat) const;
  std::optional<std::size_t> seat_of(const std::string& token) const;
  /// Points card -> value for one seat's preference.
  std::vector<int> values(std::size_t seat) const;
  /// Requires phase Finished.
  GameMetrics metrics() const;

  const std::vector<nlohmann::json>& log() const { return log_; }

  /// Rebuilds a session from its log. Throws ReplayError on any inconsistency.
  static GameSession replay(const std::vector<nlohmann::json>& events);

  static std::string hash_token(const std::string& token);

 private:
  GameSession() = default;
  void emit(nlohmann::json ev);
  void apply(nlohmann::json& ev, bool replaying);
  void apply_started(nlohmann::json& ev, bool replaying);
  void apply_round_opened(nlohmann::json& ev, bool replaying);
  void apply_action(nlohmann::json& ev, bool replaying);
  void apply_round_closed(nlohmann::json& ev, bool replaying);
  void apply_finished(nlohmann::json& ev, bool replaying);
  void open_round();
  GameMetrics compute_metrics() const;
  void require_phase(Phase p, const char* what) const;

  std::string id_;
  GameConfig config_;
  std::uint64_t seed_ = 0;
  Rng rng_{0};
  CandidateSet candidates_;
  std::vector<Preference> pool_;
  Phase phase_ = Phase::Lobby;
  int t_ = 0;
  std::vector<Seat> seats_;
  BallotProfile ballots_;
  ScoreVector tallies_;
  ScoreVector truthful_;
  std::optional<Candidate> winner_;
  bool finished_ = false;
  bool open_ = false;  // a round is accepting actions
  std::vector<RoundRecord> rounds_;
  std::vector<ActionRecord> actions_;
  std::vector<std::optional<Candidate>> pending_;  // this round's applications, by seat
  std::vector<bool> acted_;
  std::vector<nlohmann::json> log_;
};

}  // namespace cud::game
