#include "cud/agent.hpp"

namespace cud {

std::strong_ordering compare_outcomes(AgentKind kind, const Preference& pref, const ScoreVector& s,
                                      const ScoreVector& s2, int t, const RuleConfig& rule) {
  const Candidate w = pref.top_of(outcome_set(s, t, rule));
  const Candidate w2 = pref.top_of(outcome_set(s2, t, rule));
  if (w != w2) return pref.rank(w2) <=> pref.rank(w);
  if (kind == AgentKind::Proactive && w.id < s.size()) return s[w] <=> s2[w];
  return std::strong_ordering::equal;
}

Candidate best_response(AgentKind kind, const Preference& pref, Candidate current,
                        const ScoreVector& s, int t, const RuleConfig& rule) {
  if (t < 1) throw ContractViolation("best_response: evaluation horizon t-1 must be >= 0");
  const int horizon = t - 1;
  Candidate best = current;
  ScoreVector best_scores = s;
  // Walking in preference order and replacing only on strict improvement
  // leaves the highest-ranked among equally good alternatives.
  for (Candidate c : pref.ranking()) {
    if (c == current) continue;
    ScoreVector candidate_scores = s.moved(current, c);
    if (compare_outcomes(kind, pref, candidate_scores, best_scores, horizon, rule) > 0) {
      best = c;
      best_scores = std::move(candidate_scores);
    }
  }
  return best;
}

Candidate best_response(AgentKind kind, VoterId voter, const PreferenceProfile& profile,
                        const BallotProfile& ballots, const ScoreVector& s, int t,
                        const RuleConfig& rule) {
  return best_response(kind, profile.voters.at(voter), ballots.at(voter), s, t, rule);
}

}  // namespace cud
