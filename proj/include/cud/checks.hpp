#pragma once

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cud/oracle.hpp"

namespace cud::oracle {

enum class Verdict { Pass, Fail, Skip, Finding };

std::string_view to_string(Verdict v);

/// One line of a verification report.
struct CheckResult {
  std::string instance;  // stable hash of (profile, rule, kind)
  std::string check;
  Verdict verdict = Verdict::Pass;
  std::string witness;
};

nlohmann::json to_json(const CheckResult& r);

std::string instance_hash(const PreferenceProfile& profile, const RuleConfig& rule, AgentKind kind);

// ---- trajectory lemmas ------------------------------------------------------

struct LemmaViolation {
  int lemma = 0;
  std::string detail;
};

/// Lemma 3: a ballot inside W(s,t) is its voter's top of W(s,t).
void check_state(const PreferenceProfile& profile, const RuleConfig& rule, const ProtocolState& state,
                 std::vector<LemmaViolation>& out);

/// Lemmas 1, 2 and 4 across one tick.
void check_transition(const PreferenceProfile& profile, const RuleConfig& rule, const ProtocolState& before,
                      const StepRecord& step, const ProtocolState& after, std::vector<LemmaViolation>& out);

/// Replays a trace and checks every state and tick.
std::vector<LemmaViolation> check_trace(const PreferenceProfile& profile, const GameTrace& trace);

/// Checks every state and edge of the enumerated game DAG.
std::vector<LemmaViolation> check_all_branches(const PreferenceProfile& profile, const RuleConfig& rule,
                                               AgentKind kind, const Budget& budget = {});

// ---- theorem checkers ---------------------------------------------------------

/// (exists c: truthful s_c >= sigma - tau) <=> the default is unreachable.
CheckResult check_corollary1(const PreferenceProfile& profile, const RuleConfig& rule, AgentKind kind,
                             const Budget& budget = {});

/// If some c has truthful s_c >= max(floor(n/2)+1, sigma-tau), c is the only reachable outcome.
/// Skips when the premise does not hold.
CheckResult check_theorem2(const PreferenceProfile& profile, const RuleConfig& rule, AgentKind kind,
                           const Budget& budget = {});

/// Exact additive PoA never exceeds the case bound. Skips when no valid winner is reachable.
CheckResult check_theorem3(const PreferenceProfile& profile, const RuleConfig& rule, AgentKind kind,
                           BoundReport* report = nullptr, const Budget& budget = {});

/// The same two guarantees, judged on a single sampled run.
CheckResult check_corollary1_sampled(const PreferenceProfile& profile, const GameTrace& trace);
CheckResult check_theorem2_sampled(const PreferenceProfile& profile, const GameTrace& trace);

/// Candidate meeting the Theorem 2 premise, if any.
std::optional<Candidate> theorem2_candidate(const ScoreVector& truthful, std::size_t n, const RuleConfig& rule);

}  // namespace cud::oracle
