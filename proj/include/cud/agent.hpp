#pragma once

#include <compare>

#include "cud/mdvr.hpp"
#include "cud/types.hpp"

namespace cud {

/// Orders two score vectors from one voter's point of view at horizon t.
///
/// Utilities are never materialised as numbers; lazy and proactive
/// consistency only fix this ordering. `greater` means the voter strictly
/// prefers `s` to `s2`. The default alternative sits below every valid one.
std::strong_ordering compare_outcomes(AgentKind kind, const Preference& pref, const ScoreVector& s,
                                      const ScoreVector& s2, int t, const RuleConfig& rule);

/// The ballot voter `voter` would cast if picked at remaining time t.
///
/// Every valid candidate c is scored as s - b_i + c at horizon t - 1. The
/// current ballot is kept unless some alternative is strictly better;
/// among the strictly better ones of maximal value, the one ranked
/// highest by the voter wins. Never returns the default.
Candidate best_response(AgentKind kind, const Preference& pref, Candidate current,
                        const ScoreVector& s, int t, const RuleConfig& rule);

Candidate best_response(AgentKind kind, VoterId voter, const PreferenceProfile& profile,
                        const BallotProfile& ballots, const ScoreVector& s, int t,
                        const RuleConfig& rule);

}  // namespace cud
