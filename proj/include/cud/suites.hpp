#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "cud/checks.hpp"

namespace cud::oracle {

struct SuiteOptions {
  std::uint64_t seed = 1;
  int sampled_runs = 10'000;      // seeded engine runs (n <= 10, m <= 5)
  int random_instances = 1'000;   // larger instances judged on sampled runs
  std::size_t grid_max_voters = 4;
  int grid_max_candidates = 3;
  int grid_max_tau = 4;
  Budget budget;
};

struct SuiteSummary {
  std::string suite;
  std::size_t pass = 0;
  std::size_t fail = 0;
  std::size_t skip = 0;
  std::size_t finding = 0;
  double seconds = 0.0;

  bool ok() const { return fail == 0; }
  void count(Verdict v);
};

using RecordSink = std::function<void(const CheckResult&)>;

/// Calls `fn` for every ordered profile of n voters over m lettered candidates.
void for_each_profile(std::size_t n, int m, const std::function<void(const PreferenceProfile&)>& fn);

/// Lemmas 1-4 on seeded runs and on every branch of the exhaustive grid.
SuiteSummary run_lemma_suite(const SuiteOptions& opt, const RecordSink& sink);

/// Corollary 1, Theorem 2 and the Theorem 3 bound on the exhaustive grid,
/// plus sampled checks on larger random instances.
SuiteSummary run_theorem_suite(const SuiteOptions& opt, const RecordSink& sink);

/// Block profiles reach the case-2 and case-3 bounds with equality.
SuiteSummary run_tightness_suite(const SuiteOptions& opt, const RecordSink& sink);

/// The everyone's-second candidate never becomes reachable.
SuiteSummary run_condorcet_suite(const SuiteOptions& opt, const RecordSink& sink);

/// Lazy and proactive reachable winner sets on the exhaustive grid;
/// divergences are reported as findings.
SuiteSummary run_kinds_suite(const SuiteOptions& opt, const RecordSink& sink);

struct TightnessParams {
  std::size_t n;
  int sigma;
  int tau;
};
const std::vector<TightnessParams>& case2_params();
const std::vector<TightnessParams>& case3_params();

}  // namespace cud::oracle
