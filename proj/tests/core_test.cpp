#include <doctest.h>

#include <sstream>

#include "cud/agent.hpp"
#include "cud/mdvr.hpp"
#include "cud/protocol.hpp"
#include "cud/trace_io.hpp"
#include "test_support.hpp"

using namespace cud;
using cud::testing::example1_profile;
using cud::testing::example2_profile;

namespace {

const Candidate A{0}, B{1}, C{2}, D{3};

CandidateMask mask(std::initializer_list<Candidate> cs) {
  CandidateMask m;
  for (Candidate c : cs) m.insert(c);
  return m;
}

}  // namespace

TEST_CASE("compute_scores tallies ballots per candidate") {
  CHECK(compute_scores(std::vector{A, B, C}, 3) == ScoreVector({1, 1, 1}));
  CHECK(compute_scores(std::vector{A, A, A, A}, 3) == ScoreVector({4, 0, 0}));
  CHECK(compute_scores(std::vector{A, A, B, B, C}, 4) == ScoreVector({2, 2, 1, 0}));
  CHECK_THROWS_AS(compute_scores(std::vector{Candidate{3}}, 3), ContractViolation);
}

TEST_CASE("possible winners use the deficit-to-threshold test") {
  const auto rule3 = RuleConfig::unanimity(3, 2);
  CHECK(possible_winners(ScoreVector({1, 1, 1}), 2, rule3) == mask({A, B, C}));
  CHECK(possible_winners(ScoreVector({0, 2, 1}), 1, rule3) == mask({B}));
  CHECK(possible_winners(ScoreVector({0, 0, 0}), 0, rule3).empty());
  CHECK(possible_winners(ScoreVector({1, 1, 1}), 1, rule3).empty());
}

TEST_CASE("mdvr resolves singletons and the default") {
  const auto rule3 = RuleConfig::unanimity(3, 2);
  auto v = mdvr(ScoreVector({0, 3, 0}), 0, rule3);
  REQUIRE(v.resolved);
  CHECK(*v.resolved == B);

  v = mdvr(ScoreVector({1, 1, 1}), 0, rule3);
  REQUIRE(v.resolved);
  CHECK(*v.resolved == Candidate{3});
  CHECK(v.possible.empty());

  const auto rule5 = RuleConfig::unanimity(5, 4);
  v = mdvr(ScoreVector({2, 2, 1, 0}), 3, rule5);
  CHECK_FALSE(v.resolved);
  CHECK(v.possible == mask({A, B}));
}

TEST_CASE("top_of picks the best member under the voter's order") {
  const auto p = example1_profile();
  CHECK(p.voters[0].top_of(mask({B, C})) == B);
  CHECK(p.voters[1].top_of(mask({A})) == A);
  CHECK(p.voters[0].top_of(CandidateMask::of(Candidate{3})) == Candidate{3});
  CHECK_THROWS_AS(p.voters[0].top_of(CandidateMask{}), ContractViolation);

  const auto q = example2_profile();
  CHECK(q.voters[4].top_of(mask({A, B})) == B);
  CHECK(q.voters[4].top_of(mask({A, B, Candidate{4}})) == B);
}

TEST_CASE("lazy voter 5 is indifferent across the Table 3 rows") {
  const auto q = example2_profile();
  const auto rule = RuleConfig::unanimity(5, 4);
  const std::vector<ScoreVector> rows = {ScoreVector({3, 2, 0, 0}), ScoreVector({2, 3, 0, 0}),
                                         ScoreVector({2, 2, 1, 0}), ScoreVector({2, 2, 0, 1})};
  for (const auto& s : rows)
    for (const auto& s2 : rows) CHECK(compare_outcomes(AgentKind::Lazy, q.voters[4], s, s2, 3, rule) == 0);
}

TEST_CASE("proactive voter 5 prefers raising b's score") {
  const auto q = example2_profile();
  const auto rule = RuleConfig::unanimity(5, 4);
  const ScoreVector keep({2, 2, 1, 0}), to_b({2, 3, 0, 0});
  CHECK(compare_outcomes(AgentKind::Proactive, q.voters[4], to_b, keep, 3, rule) > 0);
  CHECK(compare_outcomes(AgentKind::Proactive, q.voters[4], keep, to_b, 3, rule) < 0);
  CHECK(compare_outcomes(AgentKind::Proactive, q.voters[4], keep, keep, 3, rule) == 0);
  CHECK(compare_outcomes(AgentKind::Lazy, q.voters[4], keep, keep, 3, rule) == 0);
}

TEST_CASE("default outcome ranks below every valid candidate") {
  const auto p = example1_profile();
  const auto rule = RuleConfig::unanimity(3, 2);
  // voter 1's worst valid candidate c still beats the default
  CHECK(compare_outcomes(AgentKind::Lazy, p.voters[0], ScoreVector({0, 1, 2}), ScoreVector({1, 1, 1}), 1, rule) > 0);
  CHECK(compare_outcomes(AgentKind::Proactive, p.voters[0], ScoreVector({1, 1, 1}), ScoreVector({1, 1, 1}), 0, rule) == 0);
}

TEST_CASE("best responses of Example 1 at t=2 (Table 1)") {
  const auto p = example1_profile();
  const auto rule = RuleConfig::unanimity(3, 2);
  const BallotProfile b = truthful_ballots(p);
  const ScoreVector s = compute_scores(b, 3);
  for (AgentKind k : {AgentKind::Lazy, AgentKind::Proactive}) {
    CHECK(best_response(k, 0, p, b, s, 2, rule) == B);
    CHECK(best_response(k, 1, p, b, s, 2, rule) == C);
    CHECK(best_response(k, 2, p, b, s, 2, rule) == A);
  }
  CHECK_THROWS_AS(best_response(AgentKind::Lazy, 0, p, b, s, 0, rule), ContractViolation);
}

TEST_CASE("lazy voter 5 keeps c, proactive voter 5 switches to b (Tables 3-4)") {
  const auto q = example2_profile();
  const auto rule = RuleConfig::unanimity(5, 4);
  const BallotProfile b = truthful_ballots(q);
  const ScoreVector s = compute_scores(b, 4);
  REQUIRE(s == ScoreVector({2, 2, 1, 0}));
  CHECK(best_response(AgentKind::Lazy, 4, q, b, s, 4, rule) == C);
  CHECK(best_response(AgentKind::Proactive, 4, q, b, s, 4, rule) == B);
  for (VoterId i = 0; i < 4; ++i) {
    CHECK(best_response(AgentKind::Lazy, i, q, b, s, 4, rule) == b[i]);
    CHECK(best_response(AgentKind::Proactive, i, q, b, s, 4, rule) == b[i]);
  }
}

TEST_CASE("hand-raisers of Example 1") {
  const auto p = example1_profile();
  const auto rule = RuleConfig::unanimity(3, 2);
  ProtocolState st = ProtocolState::initial(p, rule);
  auto raisers = hand_raisers(st, p, rule, AgentKind::Lazy);
  CHECK(raisers == std::vector<HandRaise>{{0, B}, {1, C}, {2, A}});

  ScriptedChooser pick_first({0});
  StepRecord r = protocol_step(st, p, rule, AgentKind::Lazy, pick_first);
  CHECK(r.t == 2);
  CHECK(r.change == BallotChange{0, A, B});
  CHECK(st.t == 1);
  CHECK(st.scores == ScoreVector({0, 2, 1}));

  raisers = hand_raisers(st, p, rule, AgentKind::Lazy);
  CHECK(raisers == std::vector<HandRaise>{{2, B}});
}

TEST_CASE("empty hand-raiser set is a no-change tick") {
  // every voter already ballots her top of W and no move raises it
  const auto p = PreferenceProfile::from_names(CandidateSet::lettered(2), {{"a", "b"}, {"a", "b"}, {"b", "a"}});
  const auto rule = RuleConfig::majority(3, 3, 3);
  ProtocolState st = ProtocolState::initial(p, rule);
  ScriptedChooser none({});
  auto raisers = hand_raisers(st, p, rule, AgentKind::Lazy);
  CHECK(raisers.empty());
  StepRecord r = protocol_step(st, p, rule, AgentKind::Lazy, none);
  CHECK_FALSE(r.picked);
  CHECK_FALSE(r.change);
  CHECK(st.t == 2);
}

TEST_CASE("Example 1 run with forced picks ends on b after two changes") {
  const auto p = example1_profile();
  const auto rule = RuleConfig::unanimity(3, 2);
  ScriptedChooser picks({0, 2});
  const GameTrace tr = run_protocol(p, rule, AgentKind::Lazy, picks);
  REQUIRE(tr.steps.size() == 2);
  CHECK(tr.steps[0].scores_before == ScoreVector({1, 1, 1}));
  CHECK(tr.steps[1].scores_before == ScoreVector({0, 2, 1}));
  CHECK(tr.final_scores == ScoreVector({0, 3, 0}));
  CHECK(tr.winner == B);
  CHECK(tr.changes() == 2);
  CHECK(tr.converged);
  CHECK(tr.stop_time == 0);

  std::ostringstream os;
  render_trace_table(os, p, tr);
  CHECK(os.str().find("winner b after 2 change(s)") != std::string::npos);
}

TEST_CASE("literal singleton stopping ends Example 1 one step earlier with the same winner") {
  const auto p = example1_profile();
  const auto rule = RuleConfig::unanimity(3, 2);
  ScriptedChooser picks({0});
  const GameTrace tr = run_protocol(p, rule, AgentKind::Lazy, picks, StopRule::Singleton);
  CHECK(tr.winner == B);
  CHECK(tr.changes() == 1);
  CHECK(tr.stop_time == 1);
}

TEST_CASE("unanimous truthful top wins with no changes") {
  const auto p = PreferenceProfile::from_names(CandidateSet::lettered(3), {{"b", "a", "c"}, {"b", "c", "a"}, {"b", "a", "c"}});
  for (int tau : {0, 1, 5}) {
    const GameTrace tr = run_protocol(p, RuleConfig::unanimity(3, tau), AgentKind::Proactive, std::uint64_t{7});
    CHECK(tr.winner == B);
    CHECK(tr.changes() == 0);
  }
}

TEST_CASE("Example 1 with no time left defaults") {
  const auto p = example1_profile();
  const GameTrace tr = run_protocol(p, RuleConfig::unanimity(3, 0), AgentKind::Lazy, std::uint64_t{1});
  CHECK(tr.winner == Candidate{3});
  CHECK_FALSE(tr.converged);
  CHECK(tr.steps.empty());
}

TEST_CASE("rule validation") {
  CHECK_THROWS_AS(RuleConfig::majority(4, 2, 1), std::invalid_argument);
  CHECK_THROWS_AS(RuleConfig::majority(4, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(RuleConfig::majority(4, 3, -1), std::invalid_argument);
  CHECK(RuleConfig::majority(4, 3, 2).variant == Variant::IMaj);
  CHECK(RuleConfig::majority(4, 4, 2).variant == Variant::IUn);
  RuleConfig bad{3, 1, Variant::IUn};
  CHECK_THROWS_AS(bad.validate(4), std::invalid_argument);
}

TEST_CASE("preference validation") {
  CHECK_THROWS_AS(Preference({A, A}), std::invalid_argument);
  CHECK_THROWS_AS(Preference({A, Candidate{5}}), std::invalid_argument);
  CHECK_THROWS_AS(CandidateSet({"a", "a"}), std::invalid_argument);
  CHECK_THROWS_AS(CandidateSet({"a", "psi"}), std::invalid_argument);
  const Preference p({C, A, B});
  CHECK(p.rank(C) == 0);
  CHECK(p.rank(Candidate{3}) == 3);
  CHECK(p.prefers(A, B));
}

TEST_CASE("rng bounded draws are reproducible and in range") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.uniform_index(7);
    CHECK(x == b.uniform_index(7));
    CHECK(x < 7);
  }
  // pinned first draws guard against silent changes to the draw procedure
  Rng c(2024);
  std::vector<std::uint64_t> first;
  for (int i = 0; i < 5; ++i) first.push_back(c.uniform_index(10));
  std::mt19937_64 ref(2024);
  for (int i = 0; i < 5; ++i) CHECK(first[static_cast<std::size_t>(i)] == ref() % 10);
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
}

// ---- properties over random instances -------------------------------------

TEST_CASE("protocol invariants over seeded random runs") {
  Rng gen(20260101);
  int runs = 0;
  for (int iter = 0; iter < 3000; ++iter) {
    const std::size_t n = 1 + gen.uniform_index(9);
    const int m = 2 + static_cast<int>(gen.uniform_index(4));
    const auto profile = cud::testing::random_profile(n, m, gen);
    const auto rule = cud::testing::random_rule(n, 12, gen);
    const AgentKind kind = gen.uniform_index(2) ? AgentKind::Lazy : AgentKind::Proactive;
    const std::uint64_t seed = gen.next();
    const GameTrace tr = run_protocol(profile, rule, kind, seed);
    ++runs;

    // determinism
    CHECK(tr == run_protocol(profile, rule, kind, seed));

    // conservation and valid ballots along the trace
    for (const auto& r : tr.steps) {
      CHECK(r.scores_before.total() == static_cast<int>(n));
      for (const auto& h : r.hand_raisers) CHECK(profile.candidates.is_valid(h.desired));
      if (r.change) {
        CHECK(r.picked == r.change->voter);
        CHECK(r.change->from != r.change->to);
      }
    }
    CHECK(tr.final_scores.total() == static_cast<int>(n));
    CHECK(tr.changes() <= rule.tau);

    // termination: default iff no possible winner at the start
    const ScoreVector s0 = compute_scores(tr.initial_ballots, m);
    const bool empty_at_start = possible_winners(s0, rule.tau, rule).empty();
    CHECK(tr.converged == !empty_at_start);

    // the first singleton W (if any) is the final winner
    for (const auto& r : tr.steps) {
      if (auto only = possible_winners(r.scores_before, r.t, rule).single()) {
        CHECK(*only == tr.winner);
        break;
      }
    }
    if (tr.converged) CHECK(tr.final_scores[tr.winner] >= rule.sigma);
  }
  CHECK(runs == 3000);
}

TEST_CASE("stop rules agree on the winner for identical pick sequences") {
  Rng gen(77);
  for (int iter = 0; iter < 1000; ++iter) {
    const std::size_t n = 1 + gen.uniform_index(8);
    const int m = 2 + static_cast<int>(gen.uniform_index(3));
    const auto profile = cud::testing::random_profile(n, m, gen);
    const auto rule = cud::testing::random_rule(n, 10, gen);
    const AgentKind kind = gen.uniform_index(2) ? AgentKind::Lazy : AgentKind::Proactive;
    const GameTrace full = run_protocol(profile, rule, kind, gen.next());
    std::vector<VoterId> picks;
    for (const auto& r : full.steps)
      if (r.picked) picks.push_back(*r.picked);
    // the literal rule can run past a sigma-holder when sigma < n, so
    // continue with fresh draws once the recorded picks run out
    struct ReplayThenDraw final : Chooser {
      ScriptedChooser scripted;
      std::size_t left;
      RngChooser rest{99};
      ReplayThenDraw(std::vector<VoterId> p) : scripted(p), left(p.size()) {}
      std::size_t choose(std::span<const HandRaise> r) override {
        if (left == 0) return rest.choose(r);
        --left;
        return scripted.choose(r);
      }
    } replay(picks);
    const GameTrace literal = run_protocol(profile, rule, kind, replay, StopRule::Singleton);
    CHECK(literal.winner == full.winner);
  }
}
