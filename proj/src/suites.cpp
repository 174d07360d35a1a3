#include "cud/suites.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "cud/mdvr.hpp"
#include "cud/rng.hpp"
#include "cud/trace_io.hpp"

namespace cud::oracle {

void SuiteSummary::count(Verdict v) {
  switch (v) {
    case Verdict::Pass: ++pass; break;
    case Verdict::Fail: ++fail; break;
    case Verdict::Skip: ++skip; break;
    case Verdict::Finding: ++finding; break;
  }
}

namespace {

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void emit(SuiteSummary& sum, const RecordSink& sink, CheckResult r) {
  sum.count(r.verdict);
  if (sink) sink(r);
}

std::vector<Preference> all_orders(int m) {
  std::vector<Candidate> r;
  for (int i = 0; i < m; ++i) r.push_back(Candidate{i});
  std::vector<Preference> out;
  do {
    out.emplace_back(r);
  } while (std::next_permutation(r.begin(), r.end()));
  return out;
}

Preference random_order(int m, Rng& rng) {
  std::vector<Candidate> r;
  for (int i = 0; i < m; ++i) r.push_back(Candidate{i});
  for (int i = m - 1; i > 0; --i)
    std::swap(r[static_cast<std::size_t>(i)], r[rng.uniform_index(static_cast<std::uint64_t>(i) + 1)]);
  return Preference(std::move(r));
}

PreferenceProfile random_profile(std::size_t n, int m, Rng& rng) {
  std::vector<Preference> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(random_order(m, rng));
  return PreferenceProfile(CandidateSet::lettered(m), std::move(v));
}

int random_between(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(hi - lo + 1)));
}

// every valid (sigma, tau) for n, with tau in [0, max_tau]
template <class Fn>
void for_each_rule(std::size_t n, int max_tau, Fn&& fn) {
  for (int sigma = static_cast<int>(n) / 2 + 1; sigma <= static_cast<int>(n); ++sigma)
    for (int tau = 0; tau <= max_tau; ++tau) fn(RuleConfig::majority(n, sigma, tau));
}

std::string join_violations(const std::vector<LemmaViolation>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size() && i < 3; ++i) {
    if (!out.empty()) out += "; ";
    out += "lemma " + std::to_string(v[i].lemma) + ": " + v[i].detail;
  }
  if (v.size() > 3) out += "; ... (" + std::to_string(v.size()) + " total)";
  return out;
}

template <class Fn>
void for_each_grid_instance(const SuiteOptions& opt, Fn&& fn) {
  for (std::size_t n = 1; n <= opt.grid_max_voters; ++n)
    for (int m = 1; m <= opt.grid_max_candidates; ++m)
      for_each_profile(n, m, [&](const PreferenceProfile& p) {
        for_each_rule(n, opt.grid_max_tau, [&](const RuleConfig& rule) { fn(p, rule); });
      });
}

}  // namespace

void for_each_profile(std::size_t n, int m, const std::function<void(const PreferenceProfile&)>& fn) {
  const std::vector<Preference> orders = all_orders(m);
  std::vector<std::size_t> idx(n, 0);
  const CandidateSet cs = CandidateSet::lettered(m);
  for (;;) {
    std::vector<Preference> voters;
    voters.reserve(n);
    for (std::size_t i : idx) voters.push_back(orders[i]);
    fn(PreferenceProfile(cs, std::move(voters)));
    std::size_t k = 0;
    while (k < n && ++idx[k] == orders.size()) idx[k++] = 0;
    if (k == n) break;
  }
}

SuiteSummary run_lemma_suite(const SuiteOptions& opt, const RecordSink& sink) {
  Timer timer;
  SuiteSummary sum{"lemmas"};
  Rng gen(derive_seed(opt.seed, {hash_string("lemmas")}));
  for (int run = 0; run < opt.sampled_runs; ++run) {
    const std::size_t n = static_cast<std::size_t>(random_between(gen, 1, 10));
    const int m = random_between(gen, 2, 5);
    const PreferenceProfile p = random_profile(n, m, gen);
    const int sigma = random_between(gen, static_cast<int>(n) / 2 + 1, static_cast<int>(n));
    const RuleConfig rule = RuleConfig::majority(n, sigma, random_between(gen, 0, 12));
    const AgentKind kind = gen.uniform_index(2) ? AgentKind::Proactive : AgentKind::Lazy;
    const GameTrace tr = run_protocol(p, rule, kind, gen.next());
    const auto v = check_trace(p, tr);
    emit(sum, sink,
         {instance_hash(p, rule, kind), "lemmas-sampled", v.empty() ? Verdict::Pass : Verdict::Fail,
          v.empty() ? std::to_string(tr.steps.size()) + " steps" : join_violations(v)});
  }
  for_each_grid_instance(opt, [&](const PreferenceProfile& p, const RuleConfig& rule) {
    for (AgentKind kind : {AgentKind::Lazy, AgentKind::Proactive}) {
      const auto v = check_all_branches(p, rule, kind, opt.budget);
      emit(sum, sink,
           {instance_hash(p, rule, kind), "lemmas-exhaustive", v.empty() ? Verdict::Pass : Verdict::Fail,
            join_violations(v)});
    }
  });
  sum.seconds = timer.seconds();
  return sum;
}

SuiteSummary run_theorem_suite(const SuiteOptions& opt, const RecordSink& sink) {
  Timer timer;
  SuiteSummary sum{"theorems"};
  for_each_grid_instance(opt, [&](const PreferenceProfile& p, const RuleConfig& rule) {
    for (AgentKind kind : {AgentKind::Lazy, AgentKind::Proactive}) {
      emit(sum, sink, check_corollary1(p, rule, kind, opt.budget));
      emit(sum, sink, check_theorem2(p, rule, kind, opt.budget));
      emit(sum, sink, check_theorem3(p, rule, kind, nullptr, opt.budget));
    }
  });
  // larger instances: only the engine-sampled side
  Rng gen(derive_seed(opt.seed, {hash_string("theorems")}));
  for (int i = 0; i < opt.random_instances; ++i) {
    const std::size_t n = static_cast<std::size_t>(random_between(gen, 5, 30));
    const int m = random_between(gen, 2, 8);
    PreferenceProfile p = random_profile(n, m, gen);
    // bias half the instances towards a strong front-runner so Theorem 2 is exercised
    if (i % 2 == 0) {
      const Preference lead = p.voters.front();
      const std::size_t copies = n / 2 + static_cast<std::size_t>(gen.uniform_index(n / 2 + 1));
      for (std::size_t v = 0; v < copies && v < n; ++v) {
        std::vector<Candidate> r = p.voters[v].ranking();
        auto it = std::find(r.begin(), r.end(), lead.top());
        std::rotate(r.begin(), it, it + 1);
        p.voters[v] = Preference(std::move(r));
      }
    }
    const int sigma = random_between(gen, static_cast<int>(n) / 2 + 1, static_cast<int>(n));
    const RuleConfig rule = RuleConfig::majority(n, sigma, random_between(gen, 0, static_cast<int>(n) + 2));
    const AgentKind kind = gen.uniform_index(2) ? AgentKind::Proactive : AgentKind::Lazy;
    const GameTrace tr = run_protocol(p, rule, kind, gen.next());
    emit(sum, sink, check_corollary1_sampled(p, tr));
    emit(sum, sink, check_theorem2_sampled(p, tr));
  }
  sum.seconds = timer.seconds();
  return sum;
}

const std::vector<TightnessParams>& case2_params() {
  static const std::vector<TightnessParams> params = {
      {7, 5, 3}, {7, 6, 4}, {7, 7, 5}, {9, 7, 5}, {9, 8, 5}, {9, 8, 6}, {9, 9, 6}, {9, 9, 7}};
  return params;
}

const std::vector<TightnessParams>& case3_params() {
  static const std::vector<TightnessParams> params = {
      {5, 3, 3}, {5, 4, 4}, {5, 5, 5}, {5, 5, 7}, {7, 4, 5}, {7, 5, 5}, {7, 6, 6}, {7, 7, 7}, {7, 7, 9}};
  return params;
}

SuiteSummary run_tightness_suite(const SuiteOptions& opt, const RecordSink& sink) {
  Timer timer;
  SuiteSummary sum{"tightness"};
  Budget budget = opt.budget;
  budget.max_voters = std::max<std::size_t>(budget.max_voters, 9);
  budget.max_tau = std::max(budget.max_tau, 9);
  budget.max_candidates = std::max(budget.max_candidates, 6);
  for (int bound_case : {2, 3}) {
    for (const auto& prm : bound_case == 2 ? case2_params() : case3_params()) {
      const PreferenceProfile p = gen_tightness_profile(bound_case, prm.n, prm.sigma, prm.tau);
      const RuleConfig rule = RuleConfig::majority(prm.n, prm.sigma, prm.tau);
      for (AgentKind kind : {AgentKind::Lazy, AgentKind::Proactive}) {
        BoundReport b;
        CheckResult r = check_theorem3(p, rule, kind, &b, budget);
        r.check = "tightness-case" + std::to_string(bound_case);
        r.witness = "n=" + std::to_string(prm.n) + " sigma=" + std::to_string(prm.sigma) +
                    " tau=" + std::to_string(prm.tau) + " " + r.witness;
        if (!b.tight || b.bound_case != bound_case) r.verdict = Verdict::Fail;
        emit(sum, sink, std::move(r));
      }
    }
  }
  sum.seconds = timer.seconds();
  return sum;
}

SuiteSummary run_condorcet_suite(const SuiteOptions& opt, const RecordSink& sink) {
  Timer timer;
  SuiteSummary sum{"condorcet"};
  Budget budget = opt.budget;
  budget.max_tau = std::max(budget.max_tau, 8);
  for (std::size_t n : {3, 6}) {
    for (int m : {4, 5}) {
      const PreferenceProfile p = condorcet_counterexample(n, m);
      const Candidate c = *p.candidates.find("c");
      for (int sigma = static_cast<int>(n) / 2 + 1; sigma <= static_cast<int>(n); ++sigma) {
        for (int tau = 0; tau <= static_cast<int>(n) + 2; ++tau) {
          const RuleConfig rule = RuleConfig::majority(n, sigma, tau);
          for (AgentKind kind : {AgentKind::Lazy, AgentKind::Proactive}) {
            const ReachableOutcome out = enumerate(p, rule, kind, budget);
            CheckResult r{instance_hash(p, rule, kind), "condorcet", Verdict::Pass,
                          "n=" + std::to_string(n) + " m=" + std::to_string(m) + " sigma=" + std::to_string(sigma) +
                              " tau=" + std::to_string(tau) + " reachable=" + format_set(p.candidates, out.winners) +
                              (out.default_reachable ? "+default" : "")};
            if (out.winners.contains(c)) r.verdict = Verdict::Fail;
            emit(sum, sink, std::move(r));
          }
        }
      }
    }
  }
  sum.seconds = timer.seconds();
  return sum;
}

SuiteSummary run_kinds_suite(const SuiteOptions& opt, const RecordSink& sink) {
  Timer timer;
  SuiteSummary sum{"kinds"};
  for_each_grid_instance(opt, [&](const PreferenceProfile& p, const RuleConfig& rule) {
    const ReachableOutcome lazy = enumerate(p, rule, AgentKind::Lazy, opt.budget);
    const ReachableOutcome pro = enumerate(p, rule, AgentKind::Proactive, opt.budget);
    const bool same = lazy.winners == pro.winners && lazy.default_reachable == pro.default_reachable;
    CheckResult r{instance_hash(p, rule, AgentKind::Lazy), "lazy-vs-proactive",
                  same ? Verdict::Pass : Verdict::Finding,
                  "lazy=" + format_set(p.candidates, lazy.winners) + (lazy.default_reachable ? "+default" : "") +
                      " proactive=" + format_set(p.candidates, pro.winners) +
                      (pro.default_reachable ? "+default" : "")};
    emit(sum, sink, std::move(r));
  });
  sum.seconds = timer.seconds();
  return sum;
}

}  // namespace cud::oracle
