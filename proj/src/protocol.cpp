#include "cud/protocol.hpp"

#include <algorithm>

#include "cud/agent.hpp"
#include "cud/mdvr.hpp"

namespace cud {

ProtocolState ProtocolState::initial(const PreferenceProfile& profile, const RuleConfig& rule) {
  rule.validate(profile.voter_count());
  ProtocolState s;
  s.ballots = truthful_ballots(profile);
  s.scores = compute_scores(s.ballots, profile.candidate_count());
  s.t = rule.tau;
  return s;
}

std::size_t RngChooser::choose(std::span<const HandRaise> raisers) {
  return static_cast<std::size_t>(rng_.uniform_index(raisers.size()));
}

std::size_t ScriptedChooser::choose(std::span<const HandRaise> raisers) {
  if (next_ >= picks_.size()) throw ContractViolation("scripted chooser ran out of picks");
  const VoterId want = picks_[next_++];
  for (std::size_t i = 0; i < raisers.size(); ++i)
    if (raisers[i].voter == want) return i;
  throw ContractViolation("scripted pick " + std::to_string(want) + " did not raise a hand");
}

int GameTrace::changes() const {
  return static_cast<int>(
      std::count_if(steps.begin(), steps.end(), [](const StepRecord& r) { return r.change.has_value(); }));
}

std::vector<HandRaise> hand_raisers(const ProtocolState& state, const PreferenceProfile& profile,
                                    const RuleConfig& rule, AgentKind kind) {
  std::vector<HandRaise> out;
  for (VoterId i = 0; i < profile.voter_count(); ++i) {
    const Candidate w = best_response(kind, profile.voters[i], state.ballots[i], state.scores, state.t, rule);
    if (w != state.ballots[i]) out.push_back({i, w});
  }
  return out;
}

std::optional<Candidate> stopping_outcome(const ProtocolState& state, const RuleConfig& rule,
                                          StopRule stop_rule) {
  const CandidateMask w = possible_winners(state.scores, state.t, rule);
  const Candidate psi{state.scores.size()};
  if (w.empty()) return psi;
  if (stop_rule == StopRule::Singleton) return w.single();
  for (Candidate c : w.members())
    if (state.scores[c] >= rule.sigma) return c;
  // At t = 0 every possible winner already holds sigma ballots.
  if (state.t == 0) throw ContractViolation("unresolved state at the deadline");
  return std::nullopt;
}

void advance(ProtocolState& state, const std::optional<BallotChange>& change) {
  if (change) {
    state.ballots[change->voter] = change->to;
    state.scores.move(change->from, change->to);
  }
  --state.t;
}

StepRecord protocol_step(ProtocolState& state, const PreferenceProfile& profile,
                         const RuleConfig& rule, AgentKind kind, Chooser& chooser) {
  if (state.t < 1) throw ContractViolation("protocol_step: no steps remain");
  StepRecord rec;
  rec.t = state.t;
  rec.scores_before = state.scores;
  rec.hand_raisers = hand_raisers(state, profile, rule, kind);
  if (!rec.hand_raisers.empty()) {
    const std::size_t idx = chooser.choose(rec.hand_raisers);
    const HandRaise& h = rec.hand_raisers.at(idx);
    rec.picked = h.voter;
    rec.change = BallotChange{h.voter, state.ballots[h.voter], h.desired};
  }
  advance(state, rec.change);
  return rec;
}

GameTrace run_protocol(const PreferenceProfile& profile, const RuleConfig& rule, AgentKind kind,
                       Chooser& chooser, StopRule stop_rule) {
  ProtocolState state = ProtocolState::initial(profile, rule);
  GameTrace trace;
  trace.rule = rule;
  trace.kind = kind;
  trace.stop_rule = stop_rule;
  trace.initial_ballots = state.ballots;
  for (;;) {
    if (auto w = stopping_outcome(state, rule, stop_rule)) {
      trace.winner = *w;
      trace.stop_time = state.t;
      trace.converged = w->id < profile.candidate_count();
      break;
    }
    trace.steps.push_back(protocol_step(state, profile, rule, kind, chooser));
  }
  trace.final_scores = state.scores;
  return trace;
}

GameTrace run_protocol(const PreferenceProfile& profile, const RuleConfig& rule, AgentKind kind,
                       std::uint64_t seed, StopRule stop_rule) {
  RngChooser chooser(seed);
  GameTrace trace = run_protocol(profile, rule, kind, chooser, stop_rule);
  trace.seed = seed;
  return trace;
}

}  // namespace cud
