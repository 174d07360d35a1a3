#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cud/protocol.hpp"
#include "cud/types.hpp"

namespace cud::oracle {

/// Limits that keep exhaustive enumeration at desk scale.
struct Budget {
  std::size_t max_voters = 8;
  int max_candidates = 5;
  int max_tau = 8;
  std::size_t max_states = 4'000'000;
};

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ReachableOutcome {
  CandidateMask winners;          // valid candidates some branch ends on
  bool default_reachable = false;
  std::uint64_t branch_count = 0;  // leaves of the unfolded tree
  std::size_t distinct_states = 0;
};

/// Called once per distinct (state, pick) edge of the game DAG.
using TransitionVisitor =
    std::function<void(const ProtocolState& before, const StepRecord& step, const ProtocolState& after)>;
/// Called once per distinct state, including terminal ones.
using StateVisitor = std::function<void(const ProtocolState& state)>;

struct Visitors {
  TransitionVisitor on_transition;
  StateVisitor on_state;
};

/// Expands every possible random pick of the protocol. Dynamics depend only
/// on (ballots, t), so the tree is memoised into a DAG.
ReachableOutcome enumerate(const PreferenceProfile& profile, const RuleConfig& rule, AgentKind kind,
                           const Budget& budget = {}, StopRule stop_rule = StopRule::Consensus,
                           const Visitors* visitors = nullptr);

/// max_c s_c - min over reachable winners of s_c, on truthful scores.
/// Empty when no valid candidate is reachable.
std::optional<int> poa_from(const ScoreVector& truthful, CandidateMask winners);

std::optional<int> exact_poa(const PreferenceProfile& profile, const RuleConfig& rule, AgentKind kind,
                             const Budget& budget = {});

struct BoundReport {
  int bound_case = 0;  // 1, 2 or 3
  int bound = 0;
  std::optional<int> observed_poa;
  bool tight = false;
};

/// Case and bound of the additive price of anarchy for (n, sigma, tau).
BoundReport theorem3_bound(std::size_t n, int sigma, int tau);

/// Worst-case block profiles realising the case-2 and case-3 bounds.
/// Candidates are named w, c, c1, c2, ... in that order.
PreferenceProfile gen_tightness_profile(int bound_case, std::size_t n, int sigma, int tau);

/// Every voter ranks c second; tops split equally over a1, a2, a3.
/// Candidates: a1, a2, a3, c, then d1.. for m > 4.
PreferenceProfile condorcet_counterexample(std::size_t n, int m);

}  // namespace cud::oracle
