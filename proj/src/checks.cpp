#include "cud/checks.hpp"

#include <cstdio>

#include "cud/mdvr.hpp"
#include "cud/rng.hpp"
#include "cud/trace_io.hpp"

namespace cud::oracle {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Skip: return "skip";
    case Verdict::Finding: return "finding";
  }
  return "?";
}

nlohmann::json to_json(const CheckResult& r) {
  return {{"instance", r.instance}, {"check", r.check}, {"verdict", to_string(r.verdict)}, {"witness", r.witness}};
}

std::string instance_hash(const PreferenceProfile& profile, const RuleConfig& rule, AgentKind kind) {
  std::string canon = std::to_string(rule.sigma) + "/" + std::to_string(rule.tau) + "/" +
                      std::string(to_string(kind)) + "/" + std::to_string(profile.candidate_count()) + ":";
  for (const auto& p : profile.voters) {
    for (Candidate c : p.ranking()) canon += std::to_string(c.id) + ",";
    canon += ";";
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_string(canon)));
  return buf;
}

namespace {

std::string describe(const CandidateSet& cs, const ScoreVector& s, int t) {
  return "s=" + format_scores(s) + " t=" + std::to_string(t) + " (" + std::to_string(cs.size()) + " candidates)";
}

}  // namespace

void check_state(const PreferenceProfile& profile, const RuleConfig& rule, const ProtocolState& state,
                 std::vector<LemmaViolation>& out) {
  const CandidateMask w = possible_winners(state.scores, state.t, rule);
  if (w.empty()) return;
  for (VoterId i = 0; i < state.ballots.size(); ++i) {
    const Candidate b = state.ballots[i];
    if (w.contains(b) && profile.voters[i].top_of(w) != b)
      out.push_back({3, "voter " + std::to_string(i + 1) + " ballots " + profile.candidates.name(b) +
                            " but prefers " + profile.candidates.name(profile.voters[i].top_of(w)) + " in W at " +
                            describe(profile.candidates, state.scores, state.t)});
  }
}

void check_transition(const PreferenceProfile& profile, const RuleConfig& rule, const ProtocolState& before,
                      const StepRecord& step, const ProtocolState& after, std::vector<LemmaViolation>& out) {
  const CandidateSet& cs = profile.candidates;
  const CandidateMask w_before = possible_winners(before.scores, before.t, rule);
  const CandidateMask w_after = possible_winners(after.scores, after.t, rule);
  if (!w_after.is_subset_of(w_before))
    out.push_back({1, "W grew from " + format_set(cs, w_before) + " to " + format_set(cs, w_after) + " at " +
                          describe(cs, before.scores, before.t)});
  for (int c = 0; c < cs.size(); ++c) {
    const Candidate cand{c};
    if (after.scores[cand] > before.scores[cand] && !w_after.contains(cand))
      out.push_back({2, cs.name(cand) + " gained a vote but is outside W at " + describe(cs, after.scores, after.t)});
  }
  if (step.change) {
    const auto& ch = *step.change;
    if (before.scores[ch.from] > before.scores[ch.to])
      out.push_back({4, "voter " + std::to_string(ch.voter + 1) + " switched " + cs.name(ch.from) + "->" +
                            cs.name(ch.to) + " to a lower score at " + describe(cs, before.scores, before.t)});
  }
}

std::vector<LemmaViolation> check_trace(const PreferenceProfile& profile, const GameTrace& trace) {
  std::vector<LemmaViolation> out;
  ProtocolState state;
  state.ballots = trace.initial_ballots;
  state.scores = compute_scores(state.ballots, profile.candidate_count());
  state.t = trace.rule.tau;
  check_state(profile, trace.rule, state, out);
  for (const StepRecord& step : trace.steps) {
    ProtocolState next = state;
    advance(next, step.change);
    check_transition(profile, trace.rule, state, step, next, out);
    check_state(profile, trace.rule, next, out);
    state = std::move(next);
  }
  return out;
}

std::vector<LemmaViolation> check_all_branches(const PreferenceProfile& profile, const RuleConfig& rule,
                                               AgentKind kind, const Budget& budget) {
  std::vector<LemmaViolation> out;
  Visitors v;
  v.on_state = [&](const ProtocolState& s) { check_state(profile, rule, s, out); };
  v.on_transition = [&](const ProtocolState& a, const StepRecord& step, const ProtocolState& b) {
    check_transition(profile, rule, a, step, b, out);
  };
  enumerate(profile, rule, kind, budget, StopRule::Consensus, &v);
  return out;
}

std::optional<Candidate> theorem2_candidate(const ScoreVector& truthful, std::size_t n, const RuleConfig& rule) {
  const int need = std::max(static_cast<int>(n / 2) + 1, rule.sigma - rule.tau);
  for (int c = 0; c < truthful.size(); ++c)
    if (truthful[Candidate{c}] >= need) return Candidate{c};
  return std::nullopt;
}

namespace {

bool corollary1_condition(const ScoreVector& truthful, const RuleConfig& rule) {
  return truthful.max() >= rule.sigma - rule.tau;
}

ScoreVector truthful_scores(const PreferenceProfile& p) {
  return compute_scores(truthful_ballots(p), p.candidate_count());
}

}  // namespace

CheckResult check_corollary1(const PreferenceProfile& profile, const RuleConfig& rule, AgentKind kind,
                             const Budget& budget) {
  CheckResult r{instance_hash(profile, rule, kind), "corollary1", Verdict::Pass, ""};
  const ScoreVector s = truthful_scores(profile);
  const bool cond = corollary1_condition(s, rule);
  const ReachableOutcome out = enumerate(profile, rule, kind, budget);
  const bool ok = cond ? (!out.default_reachable && !out.winners.empty())
                       : (out.default_reachable && out.winners.empty());
  r.witness = "scores=" + format_scores(s) + " sigma-tau=" + std::to_string(rule.sigma - rule.tau) +
              " condition=" + (cond ? "true" : "false") + " reachable=" + format_set(profile.candidates, out.winners) +
              (out.default_reachable ? "+default" : "");
  if (!ok) r.verdict = Verdict::Fail;
  return r;
}

CheckResult check_theorem2(const PreferenceProfile& profile, const RuleConfig& rule, AgentKind kind,
                           const Budget& budget) {
  CheckResult r{instance_hash(profile, rule, kind), "theorem2", Verdict::Pass, ""};
  const ScoreVector s = truthful_scores(profile);
  const auto c = theorem2_candidate(s, profile.voter_count(), rule);
  if (!c) {
    r.verdict = Verdict::Skip;
    r.witness = "premise unmet: scores=" + format_scores(s);
    return r;
  }
  const ReachableOutcome out = enumerate(profile, rule, kind, budget);
  r.witness = "scores=" + format_scores(s) + " expected=" + profile.candidates.name(*c) +
              " reachable=" + format_set(profile.candidates, out.winners) + (out.default_reachable ? "+default" : "");
  if (out.default_reachable || out.winners != CandidateMask::of(*c)) r.verdict = Verdict::Fail;
  return r;
}

CheckResult check_theorem3(const PreferenceProfile& profile, const RuleConfig& rule, AgentKind kind,
                           BoundReport* report, const Budget& budget) {
  CheckResult r{instance_hash(profile, rule, kind), "theorem3", Verdict::Pass, ""};
  BoundReport b = theorem3_bound(profile.voter_count(), rule.sigma, rule.tau);
  const ReachableOutcome out = enumerate(profile, rule, kind, budget);
  b.observed_poa = poa_from(truthful_scores(profile), out.winners);
  if (b.observed_poa) b.tight = *b.observed_poa == b.bound;
  r.witness = "case=" + std::to_string(b.bound_case) + " bound=" + std::to_string(b.bound) +
              " poa=" + (b.observed_poa ? std::to_string(*b.observed_poa) : std::string("n/a"));
  if (!b.observed_poa)
    r.verdict = Verdict::Skip;
  else if (*b.observed_poa > b.bound)
    r.verdict = Verdict::Fail;
  if (report) *report = b;
  return r;
}

CheckResult check_corollary1_sampled(const PreferenceProfile& profile, const GameTrace& trace) {
  CheckResult r{instance_hash(profile, trace.rule, trace.kind), "corollary1-sampled", Verdict::Pass, ""};
  const ScoreVector s = compute_scores(trace.initial_ballots, profile.candidate_count());
  const bool cond = corollary1_condition(s, trace.rule);
  r.witness = "scores=" + format_scores(s) + " condition=" + (cond ? "true" : "false") +
              " winner=" + profile.candidates.name(trace.winner);
  if (cond != trace.converged) r.verdict = Verdict::Fail;
  return r;
}

CheckResult check_theorem2_sampled(const PreferenceProfile& profile, const GameTrace& trace) {
  CheckResult r{instance_hash(profile, trace.rule, trace.kind), "theorem2-sampled", Verdict::Pass, ""};
  const ScoreVector s = compute_scores(trace.initial_ballots, profile.candidate_count());
  const auto c = theorem2_candidate(s, profile.voter_count(), trace.rule);
  if (!c) {
    r.verdict = Verdict::Skip;
    r.witness = "premise unmet: scores=" + format_scores(s);
    return r;
  }
  r.witness = "expected=" + profile.candidates.name(*c) + " winner=" + profile.candidates.name(trace.winner);
  if (trace.winner != *c) r.verdict = Verdict::Fail;
  return r;
}

}  // namespace cud::oracle
