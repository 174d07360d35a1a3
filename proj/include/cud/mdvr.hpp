#pragma once

#include <optional>

#include "cud/types.hpp"

namespace cud {

/// Possible outcomes of the multi-stage defaulted rule at one instant.
struct OutcomeView {
  CandidateMask possible;             // possible winners, subset of C+
  std::optional<Candidate> resolved;  // singleton result, valid or default

  /// F(s,t): the possible winners, or {default} when there are none.
  CandidateMask outcomes(const CandidateSet& cs) const {
    return possible.empty() ? CandidateMask::of(cs.default_candidate()) : possible;
  }
};

/// {c in C+ : s_c >= sigma - t}.
CandidateMask possible_winners(const ScoreVector& s, int t, const RuleConfig& rule);

/// IMaj (IUn when sigma = n).
OutcomeView mdvr(const ScoreVector& s, int t, const RuleConfig& rule);

/// F(s,t) as a mask over C; the default occupies bit m.
CandidateMask outcome_set(const ScoreVector& s, int t, const RuleConfig& rule);

}  // namespace cud
