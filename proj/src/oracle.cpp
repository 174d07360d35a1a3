#include "cud/oracle.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

#include "cud/mdvr.hpp"

namespace cud::oracle {

namespace {

struct Node {
  CandidateMask outcomes;  // over C, default included
  std::uint64_t branches = 0;
};

class Enumerator {
 public:
  Enumerator(const PreferenceProfile& profile, const RuleConfig& rule, AgentKind kind, const Budget& budget,
             StopRule stop_rule, const Visitors* visitors)
      : profile_(profile), rule_(rule), kind_(kind), budget_(budget), stop_rule_(stop_rule), visitors_(visitors) {}

  Node expand(const ProtocolState& state) {
    std::string key = key_of(state);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (memo_.size() >= budget_.max_states)
      throw BudgetExceeded("enumeration exceeded " + std::to_string(budget_.max_states) + " states");

    if (visitors_ && visitors_->on_state) visitors_->on_state(state);

    Node node;
    if (auto w = stopping_outcome(state, rule_, stop_rule_)) {
      node.outcomes.insert(*w);
      node.branches = 1;
    } else {
      StepRecord base;
      base.t = state.t;
      base.scores_before = state.scores;
      base.hand_raisers = hand_raisers(state, profile_, rule_, kind_);
      if (base.hand_raisers.empty()) {
        follow(state, base, node);
      } else {
        for (const HandRaise& h : base.hand_raisers) {
          StepRecord step = base;
          step.picked = h.voter;
          step.change = BallotChange{h.voter, state.ballots[h.voter], h.desired};
          follow(state, step, node);
        }
      }
    }
    memo_.emplace(std::move(key), node);
    return node;
  }

  std::size_t states() const { return memo_.size(); }

 private:
  void follow(const ProtocolState& state, const StepRecord& step, Node& node) {
    ProtocolState next = state;
    advance(next, step.change);
    if (visitors_ && visitors_->on_transition) visitors_->on_transition(state, step, next);
    const Node child = expand(next);
    node.outcomes = node.outcomes | child.outcomes;
    if (node.branches > std::numeric_limits<std::uint64_t>::max() - child.branches)
      node.branches = std::numeric_limits<std::uint64_t>::max();
    else
      node.branches += child.branches;
  }

  static std::string key_of(const ProtocolState& s) {
    std::string key;
    key.reserve(s.ballots.size() + 1);
    for (Candidate c : s.ballots) key.push_back(static_cast<char>(c.id));
    key.push_back(static_cast<char>(s.t));
    return key;
  }

  const PreferenceProfile& profile_;
  const RuleConfig& rule_;
  AgentKind kind_;
  const Budget& budget_;
  StopRule stop_rule_;
  const Visitors* visitors_;
  std::unordered_map<std::string, Node> memo_;
};

}  // namespace

ReachableOutcome enumerate(const PreferenceProfile& profile, const RuleConfig& rule, AgentKind kind,
                           const Budget& budget, StopRule stop_rule, const Visitors* visitors) {
  if (profile.voter_count() > budget.max_voters)
    throw BudgetExceeded("too many voters for exact analysis (" + std::to_string(profile.voter_count()) + " > " +
                         std::to_string(budget.max_voters) + ")");
  if (profile.candidate_count() > budget.max_candidates)
    throw BudgetExceeded("too many candidates for exact analysis (" + std::to_string(profile.candidate_count()) +
                         " > " + std::to_string(budget.max_candidates) + ")");
  if (rule.tau > budget.max_tau)
    throw BudgetExceeded("deadline too long for exact analysis (" + std::to_string(rule.tau) + " > " +
                         std::to_string(budget.max_tau) + ")");
  if (rule.tau > 127) throw BudgetExceeded("deadline exceeds the state key range");

  Enumerator e(profile, rule, kind, budget, stop_rule, visitors);
  const Node root = e.expand(ProtocolState::initial(profile, rule));
  ReachableOutcome out;
  const Candidate psi = profile.candidates.default_candidate();
  out.default_reachable = root.outcomes.contains(psi);
  out.winners = root.outcomes & profile.candidates.all_valid();
  out.branch_count = root.branches;
  out.distinct_states = e.states();
  return out;
}

std::optional<int> poa_from(const ScoreVector& truthful, CandidateMask winners) {
  if (winners.empty()) return std::nullopt;
  int least = std::numeric_limits<int>::max();
  for (Candidate c : winners.members()) least = std::min(least, truthful[c]);
  return truthful.max() - least;
}

std::optional<int> exact_poa(const PreferenceProfile& profile, const RuleConfig& rule, AgentKind kind,
                             const Budget& budget) {
  const ReachableOutcome r = enumerate(profile, rule, kind, budget);
  return poa_from(compute_scores(truthful_ballots(profile), profile.candidate_count()), r.winners);
}

BoundReport theorem3_bound(std::size_t n, int sigma, int tau) {
  RuleConfig{sigma, tau, Variant::IMaj}.validate(n);
  const int half = static_cast<int>(n / 2);
  BoundReport r;
  if (tau <= sigma - half) {
    r.bound_case = 1;
    r.bound = 0;
  } else if (tau < sigma) {
    r.bound_case = 2;
    r.bound = half + tau - sigma;
  } else {
    r.bound_case = 3;
    // a lone voter always elects her top, so the bound cannot go negative
    r.bound = std::max(0, half - 1);
  }
  return r;
}

namespace {

// names: w, c, c1..ck
CandidateSet block_candidates(int k) {
  std::vector<std::string> names = {"w", "c"};
  for (int j = 1; j <= k; ++j) names.push_back("c" + std::to_string(j));
  return CandidateSet(std::move(names));
}

// `head` first, then every remaining candidate in id order
Preference order_with_head(std::initializer_list<Candidate> head, int m) {
  std::vector<Candidate> r(head);
  for (int i = 0; i < m; ++i)
    if (std::find(r.begin(), r.end(), Candidate{i}) == r.end()) r.push_back(Candidate{i});
  return Preference(std::move(r));
}

}  // namespace

PreferenceProfile gen_tightness_profile(int bound_case, std::size_t n, int sigma, int tau) {
  const BoundReport b = theorem3_bound(n, sigma, tau);
  const int half = static_cast<int>(n / 2);
  const Candidate w{0}, c{1};
  auto cj = [](int j) { return Candidate{1 + j}; };  // c1 has id 2
  std::vector<Preference> voters;

  if (bound_case == 2) {
    if (b.bound_case != 2) throw std::invalid_argument("case 2 requires sigma - floor(n/2) < tau < sigma");
    if (sigma - tau < 2) throw std::invalid_argument("case 2 construction requires sigma - tau >= 2");
    const int block1 = sigma - tau;
    const int k = static_cast<int>(n) - half - block1;
    const int m = k + 2;
    for (int i = 0; i < block1; ++i) voters.push_back(order_with_head({c, cj(1)}, m));
    for (int i = 0; i < half; ++i) voters.push_back(order_with_head({w, c}, m));
    for (int j = 1; j <= k; ++j) voters.push_back(order_with_head({cj(j), c}, m));
    return PreferenceProfile(block_candidates(k), std::move(voters));
  }
  if (bound_case == 3) {
    if (b.bound_case != 3) throw std::invalid_argument("case 3 requires tau >= sigma");
    if (n % 2 == 0) throw std::invalid_argument("case 3 construction requires odd n");
    if (half < 1) throw std::invalid_argument("case 3 construction requires n >= 3");
    const int k = half;
    const int m = k + 2;
    for (int i = 0; i < half; ++i) voters.push_back(order_with_head({w, c}, m));
    voters.push_back(order_with_head({c, cj(1)}, m));
    for (int j = 1; j <= k; ++j) voters.push_back(order_with_head({cj(j), c}, m));
    return PreferenceProfile(block_candidates(k), std::move(voters));
  }
  throw std::invalid_argument("tightness profiles exist for cases 2 and 3 only");
}

PreferenceProfile condorcet_counterexample(std::size_t n, int m) {
  if (m < 4) throw std::invalid_argument("condorcet counterexample needs m >= 4");
  if (n == 0 || n % 3 != 0) throw std::invalid_argument("condorcet counterexample needs n divisible by 3");
  std::vector<std::string> names = {"a1", "a2", "a3", "c"};
  for (int i = 5; i <= m; ++i) names.push_back("d" + std::to_string(i - 4));
  const Candidate c{3};
  std::vector<Preference> voters;
  for (int a = 0; a < 3; ++a)
    for (std::size_t i = 0; i < n / 3; ++i) voters.push_back(order_with_head({Candidate{a}, c}, m));
  return PreferenceProfile(CandidateSet(std::move(names)), std::move(voters));
}

}  // namespace cud::oracle
