#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cud/rng.hpp"
#include "cud/types.hpp"

namespace cud {

/// When a run is declared over.
///
/// Consensus: stop once some candidate holds sigma ballots, once no valid
/// candidate can still reach sigma, or at the deadline. This is the
/// behaviour of the worked examples and of the live game.
/// Singleton: stop as soon as F(s,t) is a singleton, read literally.
/// Both rules always declare the same winner; they differ only in how many
/// ballot changes are made on the way.
enum class StopRule { Consensus, Singleton };

struct HandRaise {
  VoterId voter = 0;
  Candidate desired;
  friend bool operator==(const HandRaise&, const HandRaise&) = default;
};

struct BallotChange {
  VoterId voter = 0;
  Candidate from;
  Candidate to;
  friend bool operator==(const BallotChange&, const BallotChange&) = default;
};

struct StepRecord {
  int t = 0;  // remaining steps when the step began
  ScoreVector scores_before;
  std::vector<HandRaise> hand_raisers;  // sorted by voter id
  std::optional<VoterId> picked;
  std::optional<BallotChange> change;
  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct ProtocolState {
  BallotProfile ballots;
  ScoreVector scores;
  int t = 0;

  static ProtocolState initial(const PreferenceProfile& profile, const RuleConfig& rule);
};

/// Picks one hand-raiser. Called only when the set is non-empty.
class Chooser {
 public:
  virtual ~Chooser() = default;
  virtual std::size_t choose(std::span<const HandRaise> raisers) = 0;
};

/// One uniform draw per non-empty hand-raiser set, over the set sorted by voter id.
class RngChooser final : public Chooser {
 public:
  explicit RngChooser(std::uint64_t seed) : rng_(seed) {}
  std::size_t choose(std::span<const HandRaise> raisers) override;

 private:
  Rng rng_;
};

/// Replays a fixed list of voter picks; throws if a scripted voter did not raise her hand.
class ScriptedChooser final : public Chooser {
 public:
  explicit ScriptedChooser(std::vector<VoterId> picks) : picks_(std::move(picks)) {}
  std::size_t choose(std::span<const HandRaise> raisers) override;

 private:
  std::vector<VoterId> picks_;
  std::size_t next_ = 0;
};

struct GameTrace {
  RuleConfig rule;
  AgentKind kind = AgentKind::Lazy;
  StopRule stop_rule = StopRule::Consensus;
  std::optional<std::uint64_t> seed;
  BallotProfile initial_ballots;
  std::vector<StepRecord> steps;
  ScoreVector final_scores;
  Candidate winner;
  int stop_time = 0;
  bool converged = false;

  int changes() const;
  friend bool operator==(const GameTrace&, const GameTrace&) = default;
};

/// Voters whose best response differs from their current ballot, by voter id.
std::vector<HandRaise> hand_raisers(const ProtocolState& state, const PreferenceProfile& profile,
                                    const RuleConfig& rule, AgentKind kind);

/// Winner if the run stops in this state.
std::optional<Candidate> stopping_outcome(const ProtocolState& state, const RuleConfig& rule,
                                          StopRule stop_rule);

/// Applies `change` (if any) and moves one step closer to the deadline.
void advance(ProtocolState& state, const std::optional<BallotChange>& change);

/// One tick: collects hand-raisers, lets `chooser` pick one, applies that
/// single change, and decrements t. An empty set is a no-change tick.
StepRecord protocol_step(ProtocolState& state, const PreferenceProfile& profile,
                         const RuleConfig& rule, AgentKind kind, Chooser& chooser);

GameTrace run_protocol(const PreferenceProfile& profile, const RuleConfig& rule, AgentKind kind,
                       Chooser& chooser, StopRule stop_rule = StopRule::Consensus);

GameTrace run_protocol(const PreferenceProfile& profile, const RuleConfig& rule, AgentKind kind,
                       std::uint64_t seed, StopRule stop_rule = StopRule::Consensus);

}  // namespace cud
