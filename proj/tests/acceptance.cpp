// Acceptance gate: one PASS/FAIL line per primary criterion.
//
//   acceptance [--only N[,N...]] [--xfail N[,N...]]
//
// Exit status is 0 when every criterion passes, or fails only where listed
// with --xfail. A listed criterion that passes also fails the run, so the
// list cannot go stale.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <unistd.h>

#include "cud/agent.hpp"
#include "cud/event_store.hpp"
#include "cud/game.hpp"
#include "cud/oracle.hpp"
#include "cud/protocol.hpp"
#include "cud/suites.hpp"
#include "cud/sweep.hpp"
#include "test_support.hpp"

using namespace cud;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v, int prec = 2) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

// Verdict tallies per check name, fed by a suite's record sink.
struct Tally {
  std::map<std::string, std::map<oracle::Verdict, std::size_t>> by_check;
  std::vector<std::string> failures;

  oracle::RecordSink sink() {
    return [this](const oracle::CheckResult& r) {
      ++by_check[r.check][r.verdict];
      if (r.verdict == oracle::Verdict::Fail && failures.size() < 3) failures.push_back(r.check + ": " + r.witness);
    };
  }
  std::size_t count(const std::string& check, oracle::Verdict v) const {
    auto it = by_check.find(check);
    if (it == by_check.end()) return 0;
    auto jt = it->second.find(v);
    return jt == it->second.end() ? 0 : jt->second;
  }
};

// ---- 1 ----------------------------------------------------------------------

Outcome criterion1() {
  Timer timer;
  const auto p = testing::example1_profile();
  const auto rule = RuleConfig::unanimity(3, 2);
  ScriptedChooser picks({0, 2});
  const GameTrace tr = run_protocol(p, rule, AgentKind::Lazy, picks);
  const double secs = timer.seconds();
  const std::vector<std::vector<int>> want = {{1, 1, 1}, {0, 2, 1}, {0, 3, 0}};
  std::vector<std::vector<int>> got;
  for (const auto& s : tr.steps) got.push_back(s.scores_before.values());
  got.push_back(tr.final_scores.values());
  const bool ok = got == want && p.candidates.name(tr.winner) == "b" && tr.converged && secs < 1.0;
  std::ostringstream d;
  d << "winner " << p.candidates.name(tr.winner) << ", scores";
  for (const auto& v : got) {
    d << " (";
    for (std::size_t i = 0; i < v.size(); ++i) d << (i ? "," : "") << v[i];
    d << ")";
  }
  d << ", " << fmt(secs * 1000, 3) << " ms";
  return {ok, d.str()};
}

// ---- 2 ----------------------------------------------------------------------

Outcome criterion2() {
  const auto q = testing::example2_profile();
  const auto rule = RuleConfig::unanimity(5, 4);
  const BallotProfile b = truthful_ballots(q);
  const ScoreVector s = compute_scores(b, 4);
  // a pick at t=4 is judged on the horizon t=3
  const Candidate lazy = best_response(AgentKind::Lazy, 4, q, b, s, 4, rule);
  const Candidate pro = best_response(AgentKind::Proactive, 4, q, b, s, 4, rule);
  const bool ok = q.candidates.name(lazy) == "c" && q.candidates.name(pro) == "b";
  return {ok, "voter 5 at horizon 3: lazy -> " + q.candidates.name(lazy) + ", proactive -> " + q.candidates.name(pro)};
}

// ---- 3 ----------------------------------------------------------------------

Outcome criterion3() {
  Tally t;
  oracle::SuiteOptions opt;
  opt.seed = 1;
  opt.sampled_runs = 10'000;
  opt.grid_max_voters = 4;
  opt.grid_max_candidates = 3;
  opt.grid_max_tau = 4;
  const auto sum = oracle::run_lemma_suite(opt, t.sink());
  const std::size_t sampled = t.count("lemmas-sampled", oracle::Verdict::Pass) +
                              t.count("lemmas-sampled", oracle::Verdict::Fail);
  const std::size_t exhaustive = t.count("lemmas-exhaustive", oracle::Verdict::Pass) +
                                 t.count("lemmas-exhaustive", oracle::Verdict::Fail);
  const bool ok = sum.fail == 0 && sampled >= 10'000 && exhaustive > 0 && sum.seconds < 300;
  std::string d = std::to_string(sampled) + " sampled runs, " + std::to_string(exhaustive) +
                  " exhaustive instances, " + std::to_string(sum.fail) + " violations, " + fmt(sum.seconds, 1) + " s";
  if (!t.failures.empty()) d += "; first: " + t.failures.front();
  return {ok, d};
}

// ---- 4 and 5 share one theorem-suite run -------------------------------------

struct TheoremRun {
  Tally tally;
  oracle::SuiteSummary sum;
};

const TheoremRun& theorem_run() {
  static const TheoremRun run = [] {
    TheoremRun r;
    oracle::SuiteOptions opt;
    opt.seed = 1;
    opt.random_instances = 1'000;
    r.sum = oracle::run_theorem_suite(opt, r.tally.sink());
    return r;
  }();
  return run;
}

Outcome criterion4() {
  const auto& r = theorem_run();
  using V = oracle::Verdict;
  std::size_t checked = 0, failed = 0;
  std::ostringstream d;
  for (const char* c : {"corollary1", "theorem2", "corollary1-sampled", "theorem2-sampled"}) {
    const std::size_t pass = r.tally.count(c, V::Pass), fail = r.tally.count(c, V::Fail);
    checked += pass + fail;
    failed += fail;
    d << c << " " << pass << "/" << pass + fail << ", ";
  }
  const std::size_t sampled =
      r.tally.count("corollary1-sampled", V::Pass) + r.tally.count("corollary1-sampled", V::Fail);
  d << failed << " violations";
  const bool ok = failed == 0 && checked > 0 && r.tally.count("corollary1", V::Pass) > 0 && sampled >= 1'000;
  std::string s = d.str();
  if (!r.tally.failures.empty()) s += "; first: " + r.tally.failures.front();
  return {ok, s};
}

Outcome criterion5() {
  using V = oracle::Verdict;
  const auto& r = theorem_run();
  const std::size_t bound_pass = r.tally.count("theorem3", V::Pass), bound_fail = r.tally.count("theorem3", V::Fail);

  // every generated worst case must hit its bound exactly, for both kinds
  oracle::Budget budget;
  budget.max_voters = 9;
  budget.max_tau = 9;
  budget.max_candidates = 6;
  int tight[4] = {0, 0, 0, 0};
  int params[4] = {0, 0, 0, 0};
  for (int bc : {2, 3}) {
    for (const auto& prm : bc == 2 ? oracle::case2_params() : oracle::case3_params()) {
      ++params[bc];
      const auto p = oracle::gen_tightness_profile(bc, prm.n, prm.sigma, prm.tau);
      const auto rule = RuleConfig::majority(prm.n, prm.sigma, prm.tau);
      const auto bound = oracle::theorem3_bound(prm.n, prm.sigma, prm.tau);
      bool all = bound.bound_case == bc;
      for (AgentKind k : {AgentKind::Lazy, AgentKind::Proactive}) {
        const auto poa = oracle::exact_poa(p, rule, k, budget);
        all = all && poa && *poa == bound.bound;
      }
      tight[bc] += all;
    }
  }
  const bool ok = bound_fail == 0 && bound_pass > 0 && tight[2] >= 5 && tight[3] >= 5 && tight[2] == params[2] &&
                  tight[3] == params[3];
  return {ok, "bound held on " + std::to_string(bound_pass) + "/" + std::to_string(bound_pass + bound_fail) +
                  " instances; equality on " + std::to_string(tight[2]) + "/" + std::to_string(params[2]) +
                  " case-2 and " + std::to_string(tight[3]) + "/" + std::to_string(params[3]) + " case-3 profiles"};
}

// ---- 6 ----------------------------------------------------------------------

Outcome criterion6() {
  oracle::Budget budget;
  budget.max_tau = 12;
  int instances = 0, hits = 0;
  for (std::size_t n : {3, 6}) {
    const auto p = oracle::condorcet_counterexample(n, 4);
    const Candidate c = *p.candidates.find("c");
    for (int sigma = static_cast<int>(n) / 2 + 1; sigma <= static_cast<int>(n); ++sigma)
      for (int tau = 0; tau <= static_cast<int>(n) + 2; ++tau)
        for (AgentKind k : {AgentKind::Lazy, AgentKind::Proactive}) {
          const auto out = oracle::enumerate(p, RuleConfig::majority(n, sigma, tau), k, budget);
          ++instances;
          hits += out.winners.contains(c);
        }
  }
  return {hits == 0 && instances > 0,
          "c reachable in " + std::to_string(hits) + " of " + std::to_string(instances) + " (n, sigma, tau, kind) instances"};
}

// ---- 7, 8, 9 share the desk-scale sweeps -------------------------------------

struct Sweeps {
  SweepResult u5, u6;
  double seconds = 0.0;
};

const Sweeps& sweeps() {
  static const Sweeps s = [] {
    Timer timer;
    Sweeps out;
    ExperimentConfig cfg;
    cfg.n = 10;
    cfg.preference_sets = 10;
    cfg.runs = 1000;
    cfg.master_seed = 1;
    cfg.dataset = DatasetSpec::uniform(5);
    out.u5 = run_sweep(cfg);
    cfg.dataset = DatasetSpec::uniform(6);
    out.u6 = run_sweep(cfg);
    out.seconds = timer.seconds();
    return out;
  }();
  return s;
}

Outcome criterion7() {
  const auto& s = sweeps();
  bool ok = s.seconds < 600;
  std::ostringstream d;
  for (auto [r, want] : {std::pair{&s.u5, 7}, std::pair{&s.u6, 8}}) {
    for (AgentKind k : r->config.kinds) {
      const auto min_tau = r->min_tau_all_converge(k);
      const auto* at = r->setting(want, k);
      const auto* below = r->setting(want - 1, k);
      const bool hit = min_tau && *min_tau == want && at && at->converged_fraction == 1.0 && below &&
                       below->converged_fraction < 1.0;
      ok = ok && hit;
      if (k == AgentKind::Lazy || !hit)
        d << r->config.dataset.name << " " << to_string(k) << ": min tau "
          << (min_tau ? std::to_string(*min_tau) : std::string("none")) << " (converged "
          << (below ? fmt(below->converged_fraction) : "?") << " at " << want - 1 << "), ";
    }
    ok = ok && r->violations.empty();
  }
  d << "proactive identical: " << (ok ? "yes" : "see above") << ", " << fmt(s.seconds, 1) << " s";
  return {ok, d.str()};
}

Outcome criterion8() {
  const auto& s = sweeps();
  std::ostringstream d;
  bool direction = true;
  int rows = 0, reversed = 0;
  for (const SweepResult* r : {&s.u5, &s.u6}) {
    const auto cmp = compare_kinds(*r);
    for (const auto& row : cmp.rows) {
      ++rows;
      if (row.changes_delta < 0) {
        ++reversed;
        direction = false;
      }
    }
  }
  const MeanStd lazy = s.u5.vote_changes(AgentKind::Lazy), pro = s.u5.vote_changes(AgentKind::Proactive);
  const bool close = std::abs(lazy.mean - 5.06) <= 1.0 && std::abs(pro.mean - 5.15) <= 1.0;
  d << "proactive >= lazy in " << rows - reversed << "/" << rows << " settings; Uniform5 mean changes lazy "
    << fmt(lazy.mean) << ", proactive " << fmt(pro.mean) << " (target 5.06/5.15 +-1.0)";
  return {direction && close && pro.mean >= lazy.mean, d.str()};
}

Outcome criterion9() {
  const auto& s = sweeps();
  bool identical = true;
  int mismatches = 0;
  for (const SweepResult* r : {&s.u5, &s.u6}) {
    const auto cmp = compare_kinds(*r);
    identical = identical && cmp.poa_identical();
    for (const auto& row : cmp.rows) mismatches += row.poa_set_mismatches;
  }
  bool zero_low = true, positive_high = true;
  std::optional<double> at8;
  for (const auto& st : s.u5.settings) {
    if (st.kind != AgentKind::Lazy) continue;
    // no converged run means no observed winner, which contributes no PoA
    const double mean = st.poa_defined_sets ? st.poa_mean : 0.0;
    if (st.tau <= 6 && mean != 0.0) zero_low = false;
    if (st.tau >= 8 && !(mean > 0.0)) positive_high = false;
    if (st.tau == 8) at8 = mean;
  }
  const bool near = at8 && std::abs(*at8 - 0.85) <= 0.5;
  std::ostringstream d;
  d << "kinds identical: " << (identical ? "yes" : "no (" + std::to_string(mismatches) + " set mismatches)")
    << "; Uniform5 PoA+ 0 for tau<=6: " << (zero_low ? "yes" : "no") << "; >0 for tau>=8: "
    << (positive_high ? "yes" : "no") << "; tau=8 mean " << (at8 ? fmt(*at8) : std::string("N/A"))
    << " (target 0.85 +-0.5)";
  return {identical && zero_low && positive_high && near, d.str()};
}

// ---- 10 ---------------------------------------------------------------------

Outcome criterion10() {
  using namespace cud::game;
  const auto dir = std::filesystem::temp_directory_path() / ("cud_acceptance_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  EventStore store(dir);
  int sessions = 0, converged = 0, precondition = 0, roundtrips = 0;
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    GameConfig c;
    c.bot_fill = BotFill::BotsOnly;  // 8 seats, tau 10
    GameSession g("s" + std::to_string(seed), c, seed);
    g.start();
    // Corollary 1: the top truthful score must be within reach
    precondition += g.truthful_tallies().max() >= c.sigma() - c.tau;
    while (g.phase() == Phase::Round) g.close_round();
    ++sessions;
    const GameMetrics m = g.metrics();
    converged += m.converged;
    store.create(g.id());
    store.append_all(g.id(), g.log());
    const GameSession back = GameSession::replay(store.load(g.id()));
    roundtrips += back.metrics() == m && metrics_from_json(to_json(m)) == m;
  }
  std::filesystem::remove_all(dir);
  std::vector<int> ladder;
  for (int r = 1; r <= 5; ++r) ladder.push_back(reward(r, 5, true));
  ladder.push_back(reward(1, 5, false));
  const bool ladder_ok = ladder == std::vector<int>{100, 80, 60, 40, 20, 0};
  const bool ok = sessions == 1000 && precondition == 1000 && converged == 1000 && roundtrips == 1000 && ladder_ok;
  std::ostringstream d;
  d << converged << "/" << sessions << " bot-only sessions converged, " << roundtrips << " exact replays, ladder";
  for (int v : ladder) d << " " << v;
  return {ok, d.str()};
}

std::set<int> parse_list(const std::string& s) {
  std::set<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.insert(std::stoi(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only, xfail;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--only") only = parse_list(argv[i + 1]);
    else if (flag == "--xfail") xfail = parse_list(argv[i + 1]);
    else {
      std::cerr << "usage: acceptance [--only N,..] [--xfail N,..]\n";
      return 2;
    }
  }
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10}};
  int passed = 0, failed = 0, expected = 0, unexpected_pass = 0;
  for (const auto& [id, fn] : criteria) {
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool known = xfail.count(id) > 0;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << o.detail;
    if (known) std::cout << (o.pass ? "  [listed as known failure but passed]" : "  [known failure]");
    std::cout << std::endl;
    if (o.pass) {
      ++passed;
      unexpected_pass += known;
    } else {
      ++failed;
      expected += known;
    }
  }
  std::cout << passed << " passed, " << failed << " failed";
  if (!xfail.empty()) std::cout << " (" << expected << " known)";
  std::cout << std::endl;
  return (failed == expected && unexpected_pass == 0) ? 0 : 1;
}
