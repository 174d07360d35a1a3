#include "cud/mdvr.hpp"

namespace cud {

CandidateMask possible_winners(const ScoreVector& s, int t, const RuleConfig& rule) {
  if (t < 0) throw ContractViolation("possible_winners: negative time");
  CandidateMask w;
  const int need = rule.sigma - t;
  for (int c = 0; c < s.size(); ++c)
    if (s[Candidate{c}] >= need) w.insert(Candidate{c});
  return w;
}

OutcomeView mdvr(const ScoreVector& s, int t, const RuleConfig& rule) {
  OutcomeView v;
  v.possible = possible_winners(s, t, rule);
  if (v.possible.empty())
    v.resolved = Candidate{s.size()};
  else
    v.resolved = v.possible.single();
  return v;
}

CandidateMask outcome_set(const ScoreVector& s, int t, const RuleConfig& rule) {
  CandidateMask w = possible_winners(s, t, rule);
  return w.empty() ? CandidateMask::of(Candidate{s.size()}) : w;
}

}  // namespace cud
