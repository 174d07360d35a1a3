#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cud/dataset.hpp"
#include "cud/oracle.hpp"
#include "cud/protocol.hpp"

namespace cud {

/// One sweep: a dataset and voter count crossed with deadlines and agent kinds.
struct ExperimentConfig {
  DatasetSpec dataset = DatasetSpec::uniform(5);
  std::size_t n = 10;
  std::vector<int> taus;  // empty: 2..n+1
  std::vector<AgentKind> kinds = {AgentKind::Lazy, AgentKind::Proactive};
  int preference_sets = 10;
  int runs = 1000;                 // per (set, tau, kind)
  std::optional<int> sigma;        // empty: n
  std::uint64_t master_seed = 1;
  StopRule stop_rule = StopRule::Consensus;
  unsigned threads = 0;            // 0: hardware concurrency
  /// Enumerate each cell exactly when it fits the budget; sampled winners
  /// must then lie inside the reachable set.
  bool exact_check = true;
  oracle::Budget oracle_budget{12, 8, 13, 200'000};

  int effective_sigma() const { return sigma.value_or(static_cast<int>(n)); }
  std::vector<int> effective_taus() const;
  /// Throws std::invalid_argument.
  void validate() const;
};

/// Seeds. The run seed ignores tau and kind, so every deadline and both agent
/// kinds replay the same random stream for a given run index.
std::uint64_t profile_seed(const ExperimentConfig& cfg, int set);
std::uint64_t run_seed(const ExperimentConfig& cfg, int set, int run);

/// Aggregates over the runs of one preference set at one (tau, kind).
struct CellStats {
  int set = 0;
  int tau = 0;
  AgentKind kind = AgentKind::Lazy;
  int runs = 0;
  int converged = 0;
  double changes_mean = 0.0;                 // over all runs
  std::optional<double> changes_mean_converged;
  int changes_max = 0;
  CandidateMask winners;                     // observed valid winners
  std::optional<int> poa;                    // empty when no run converged
  std::optional<int> exact_poa;              // from the oracle, when enumerable
};

/// One experimental setting, aggregated over preference sets.
struct SettingResult {
  std::string dataset;
  std::size_t n = 0;
  int sigma = 0;
  int tau = 0;
  AgentKind kind = AgentKind::Lazy;
  int sets = 0;
  int runs_per_set = 0;
  double converged_fraction = 0.0;
  double changes_mean = 0.0;   // mean over sets of per-set means
  double changes_std = 0.0;    // population std over sets
  double poa_mean = 0.0;       // over sets with a defined value; 0 when none
  double poa_std = 0.0;
  int poa_defined_sets = 0;
  std::optional<int> poa_max;
  int bound = 0;               // worst-case additive PoA for (n, sigma, tau)
  double exact_poa_mean = 0.0; // over sets the oracle could enumerate with a defined value
  int exact_defined_sets = 0;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

struct SweepResult {
  ExperimentConfig config;
  std::vector<ScoreVector> truthful;     // per preference set
  std::vector<CellStats> cells;          // ordered by (kind, tau, set)
  std::vector<SettingResult> settings;   // ordered by (kind, tau)
  std::vector<std::string> violations;   // invariant failures, empty when healthy
  double seconds = 0.0;

  const SettingResult* setting(int tau, AgentKind kind) const;
  /// Smallest swept tau from which every larger swept tau converged in all runs.
  std::optional<int> min_tau_all_converge(AgentKind kind) const;
  /// Vote changes per preference set averaged over all runs and all swept
  /// deadlines, then mean and std over sets.
  MeanStd vote_changes(AgentKind kind) const;
};

using ProgressFn = std::function<void(int sets_done, int sets_total)>;

SweepResult run_sweep(const ExperimentConfig& cfg, const ProgressFn& progress = {});

/// Lazy vs proactive on the same profiles and run seeds.
struct KindDelta {
  int tau = 0;
  double lazy_changes = 0.0;
  double proactive_changes = 0.0;
  double changes_delta = 0.0;        // proactive - lazy
  double lazy_poa = 0.0;
  double proactive_poa = 0.0;
  int poa_set_mismatches = 0;        // sets whose sampled PoA differs
  int exact_poa_set_mismatches = 0;  // sets whose exact PoA differs
  int convergence_mismatches = 0;    // sets whose converged count differs
};

struct KindComparison {
  std::vector<KindDelta> rows;
  MeanStd lazy_overall;
  MeanStd proactive_overall;

  bool poa_identical() const;
  bool changes_non_decreasing() const;  // every row delta >= 0
};

KindComparison compare_kinds(const SweepResult& result);
KindComparison compare_kinds(ExperimentConfig cfg);

// ---- artifacts --------------------------------------------------------------

void write_settings_csv_header(std::ostream& out);
void write_settings_csv(std::ostream& out, const SweepResult& r);
void write_cells_csv_header(std::ostream& out);
void write_cells_csv(std::ostream& out, const SweepResult& r);
void write_summary(std::ostream& out, const SweepResult& r);

/// Expands a plan file into sweeps. Relative SOC paths resolve against `base`.
std::vector<ExperimentConfig> parse_plan(const nlohmann::json& plan, const std::filesystem::path& base = {});

}  // namespace cud
