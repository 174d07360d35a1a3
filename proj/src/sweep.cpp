#include "cud/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "cud/mdvr.hpp"
#include "cud/oracle.hpp"

namespace cud {

namespace {

constexpr std::uint64_t kProfileTag = 0x70726f66696c65ULL;  // "profile"

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd r;
  if (xs.empty()) return r;
  for (double x : xs) r.mean += x;
  r.mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - r.mean) * (x - r.mean);
  r.std = std::sqrt(ss / static_cast<double>(xs.size()));
  return r;
}

std::string fmt(double x, int prec = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << x;
  std::string s = os.str();
  while (s.size() > 1 && s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

struct SetOutput {
  ScoreVector truthful;
  std::vector<CellStats> cells;  // ordered by (kind, tau)
  std::vector<std::string> violations;
};

SetOutput run_set(const ExperimentConfig& cfg, const Dataset& data, int set) {
  Rng prng(profile_seed(cfg, set));
  const PreferenceProfile profile = data.sample(cfg.n, prng);
  SetOutput out;
  out.truthful = compute_scores(truthful_ballots(profile), profile.candidate_count());
  const auto taus = cfg.effective_taus();
  const int sigma = cfg.effective_sigma();

  for (AgentKind kind : cfg.kinds) {
    int prev_converged = -1;
    for (int tau : taus) {
      const RuleConfig rule = RuleConfig::majority(cfg.n, sigma, tau);
      const bool must_converge = !possible_winners(out.truthful, tau, rule).empty();
      const int bound = oracle::theorem3_bound(cfg.n, sigma, tau).bound;
      CellStats c;
      c.set = set;
      c.tau = tau;
      c.kind = kind;
      c.runs = cfg.runs;
      double sum = 0.0, sum_conv = 0.0;
      for (int r = 0; r < cfg.runs; ++r) {
        const GameTrace tr = run_protocol(profile, rule, kind, run_seed(cfg, set, r), cfg.stop_rule);
        const int ch = tr.changes();
        sum += ch;
        c.changes_max = std::max(c.changes_max, ch);
        if (ch > tau)
          out.violations.push_back("set " + std::to_string(set) + " tau " + std::to_string(tau) + " run " +
                                   std::to_string(r) + ": " + std::to_string(ch) + " changes exceed the deadline");
        if (tr.converged != must_converge)
          out.violations.push_back("set " + std::to_string(set) + " tau " + std::to_string(tau) + " run " +
                                   std::to_string(r) + ": convergence disagrees with the initial possible winners");
        if (tr.converged) {
          ++c.converged;
          sum_conv += ch;
          c.winners.insert(tr.winner);
        }
      }
      c.changes_mean = cfg.runs ? sum / cfg.runs : 0.0;
      if (c.converged) c.changes_mean_converged = sum_conv / c.converged;
      c.poa = oracle::poa_from(out.truthful, c.winners);
      if (c.poa && *c.poa > bound)
        out.violations.push_back("set " + std::to_string(set) + " tau " + std::to_string(tau) + ": sampled PoA " +
                                 std::to_string(*c.poa) + " exceeds bound " + std::to_string(bound));
      if (c.converged < prev_converged)
        out.violations.push_back("set " + std::to_string(set) + " tau " + std::to_string(tau) +
                                 ": convergence decreased with a longer deadline");
      prev_converged = c.converged;

      // exact reachable set, when small enough to enumerate
      if (cfg.exact_check) {
        try {
          const auto exact = oracle::enumerate(profile, rule, kind, cfg.oracle_budget, cfg.stop_rule);
          c.exact_poa = oracle::poa_from(out.truthful, exact.winners);
          if (!c.winners.is_subset_of(exact.winners))
            out.violations.push_back("set " + std::to_string(set) + " tau " + std::to_string(tau) +
                                     ": observed winner outside the reachable set");
        } catch (const oracle::BudgetExceeded&) {
        }
      }
      out.cells.push_back(c);
    }
  }
  return out;
}

SettingResult aggregate(const ExperimentConfig& cfg, int tau, AgentKind kind, const std::vector<const CellStats*>& cs) {
  SettingResult s;
  s.dataset = cfg.dataset.name;
  s.n = cfg.n;
  s.sigma = cfg.effective_sigma();
  s.tau = tau;
  s.kind = kind;
  s.sets = static_cast<int>(cs.size());
  s.runs_per_set = cfg.runs;
  s.bound = oracle::theorem3_bound(cfg.n, s.sigma, tau).bound;
  long long conv = 0, total = 0;
  std::vector<double> changes, poas, exact;
  for (const CellStats* c : cs) {
    if (c->exact_poa) exact.push_back(*c->exact_poa);
    conv += c->converged;
    total += c->runs;
    changes.push_back(c->changes_mean);
    if (c->poa) {
      poas.push_back(*c->poa);
      s.poa_max = std::max(s.poa_max.value_or(0), *c->poa);
    }
  }
  s.converged_fraction = total ? static_cast<double>(conv) / static_cast<double>(total) : 0.0;
  const MeanStd ch = mean_std(changes);
  s.changes_mean = ch.mean;
  s.changes_std = ch.std;
  const MeanStd p = mean_std(poas);
  s.poa_mean = p.mean;
  s.poa_std = p.std;
  s.poa_defined_sets = static_cast<int>(poas.size());
  s.exact_poa_mean = mean_std(exact).mean;
  s.exact_defined_sets = static_cast<int>(exact.size());
  return s;
}

}  // namespace

std::vector<int> ExperimentConfig::effective_taus() const {
  if (!taus.empty()) return taus;
  std::vector<int> out;
  for (int t = 2; t <= static_cast<int>(n) + 1; ++t) out.push_back(t);
  return out;
}

void ExperimentConfig::validate() const {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  if (preference_sets < 1) throw std::invalid_argument("preference_sets must be at least 1");
  if (runs < 1) throw std::invalid_argument("runs must be at least 1");
  if (kinds.empty()) throw std::invalid_argument("at least one agent kind is required");
  if (dataset.name.empty()) throw std::invalid_argument("dataset needs a name");
  if (const auto* ic = std::get_if<ImpartialCulture>(&dataset.source); ic && ic->m < 2)
    throw std::invalid_argument("impartial culture needs at least 2 candidates");
  const auto ts = effective_taus();
  for (int t : ts) RuleConfig::majority(n, effective_sigma(), t).validate(n);
  if (!std::is_sorted(ts.begin(), ts.end()) || std::adjacent_find(ts.begin(), ts.end()) != ts.end())
    throw std::invalid_argument("tau list must be strictly increasing");
}

std::uint64_t profile_seed(const ExperimentConfig& cfg, int set) {
  return derive_seed(cfg.master_seed,
                     {hash_string(cfg.dataset.name), cfg.n, static_cast<std::uint64_t>(set), kProfileTag});
}

std::uint64_t run_seed(const ExperimentConfig& cfg, int set, int run) {
  return derive_seed(cfg.master_seed, {hash_string(cfg.dataset.name), cfg.n, static_cast<std::uint64_t>(set),
                                       static_cast<std::uint64_t>(run)});
}

const SettingResult* SweepResult::setting(int tau, AgentKind kind) const {
  for (const auto& s : settings)
    if (s.tau == tau && s.kind == kind) return &s;
  return nullptr;
}

std::optional<int> SweepResult::min_tau_all_converge(AgentKind kind) const {
  std::optional<int> best;
  const auto taus = config.effective_taus();
  for (auto it = taus.rbegin(); it != taus.rend(); ++it) {
    const SettingResult* s = setting(*it, kind);
    if (!s || s->converged_fraction < 1.0) break;
    best = *it;
  }
  return best;
}

MeanStd SweepResult::vote_changes(AgentKind kind) const {
  std::vector<double> per_set(static_cast<std::size_t>(config.preference_sets), 0.0);
  std::vector<int> cnt(per_set.size(), 0);
  for (const auto& c : cells) {
    if (c.kind != kind) continue;
    per_set[static_cast<std::size_t>(c.set)] += c.changes_mean;
    ++cnt[static_cast<std::size_t>(c.set)];
  }
  std::vector<double> xs;
  for (std::size_t i = 0; i < per_set.size(); ++i)
    if (cnt[i]) xs.push_back(per_set[i] / cnt[i]);
  return mean_std(xs);
}

SweepResult run_sweep(const ExperimentConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const Dataset data = Dataset::load(cfg.dataset);
  const int sets = cfg.preference_sets;
  std::vector<SetOutput> outputs(static_cast<std::size_t>(sets));

  std::atomic<int> next{0}, done{0};
  std::mutex mu;
  std::exception_ptr error;
  auto worker = [&] {
    for (int s = next++; s < sets; s = next++) {
      try {
        outputs[static_cast<std::size_t>(s)] = run_set(cfg, data, s);
      } catch (...) {
        std::lock_guard lk(mu);
        if (!error) error = std::current_exception();
        return;
      }
      const int d = ++done;
      if (progress) {
        std::lock_guard lk(mu);
        progress(d, sets);
      }
    }
  };
  unsigned threads = cfg.threads ? cfg.threads : std::max(1U, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(sets));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  SweepResult r;
  r.config = cfg;
  const auto taus = cfg.effective_taus();
  for (auto& o : outputs) {
    r.truthful.push_back(o.truthful);
    for (auto& v : o.violations) r.violations.push_back(std::move(v));
  }
  // cells of one set are ordered (kind, tau); regroup as (kind, tau, set)
  const std::size_t per_set = cfg.kinds.size() * taus.size();
  for (std::size_t k = 0; k < per_set; ++k) {
    std::vector<const CellStats*> group;
    for (const auto& o : outputs) {
      r.cells.push_back(o.cells[k]);
      group.push_back(&o.cells[k]);
    }
    r.settings.push_back(aggregate(cfg, group.front()->tau, group.front()->kind, group));
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

bool KindComparison::poa_identical() const {
  return std::all_of(rows.begin(), rows.end(), [](const KindDelta& d) {
    return d.poa_set_mismatches == 0 && d.lazy_poa == d.proactive_poa;
  });
}

bool KindComparison::changes_non_decreasing() const {
  return std::all_of(rows.begin(), rows.end(), [](const KindDelta& d) { return d.changes_delta >= 0.0; });
}

KindComparison compare_kinds(const SweepResult& result) {
  KindComparison out;
  for (int tau : result.config.effective_taus()) {
    const SettingResult* lazy = result.setting(tau, AgentKind::Lazy);
    const SettingResult* pro = result.setting(tau, AgentKind::Proactive);
    if (!lazy || !pro) throw std::invalid_argument("comparison needs both agent kinds in the sweep");
    KindDelta d;
    d.tau = tau;
    d.lazy_changes = lazy->changes_mean;
    d.proactive_changes = pro->changes_mean;
    d.changes_delta = pro->changes_mean - lazy->changes_mean;
    d.lazy_poa = lazy->poa_mean;
    d.proactive_poa = pro->poa_mean;
    for (const auto& a : result.cells) {
      if (a.tau != tau || a.kind != AgentKind::Lazy) continue;
      for (const auto& b : result.cells) {
        if (b.tau != tau || b.kind != AgentKind::Proactive || b.set != a.set) continue;
        if (a.poa != b.poa) ++d.poa_set_mismatches;
        if (a.exact_poa != b.exact_poa) ++d.exact_poa_set_mismatches;
        if (a.converged != b.converged) ++d.convergence_mismatches;
      }
    }
    out.rows.push_back(d);
  }
  out.lazy_overall = result.vote_changes(AgentKind::Lazy);
  out.proactive_overall = result.vote_changes(AgentKind::Proactive);
  return out;
}

KindComparison compare_kinds(ExperimentConfig cfg) {
  cfg.kinds = {AgentKind::Lazy, AgentKind::Proactive};
  return compare_kinds(run_sweep(cfg));
}

void write_settings_csv_header(std::ostream& out) {
  out << "dataset,n,sigma,tau,kind,sets,runs,converged_fraction,changes_mean,changes_std,"
         "poa_mean,poa_std,poa_defined_sets,poa_max,bound,exact_poa_mean,exact_defined_sets\n";
}

void write_settings_csv(std::ostream& out, const SweepResult& r) {
  for (const auto& s : r.settings) {
    out << csv_escape(s.dataset) << ',' << s.n << ',' << s.sigma << ',' << s.tau << ',' << to_string(s.kind) << ','
        << s.sets << ',' << s.runs_per_set << ',' << fmt(s.converged_fraction, 6) << ',' << fmt(s.changes_mean) << ','
        << fmt(s.changes_std) << ',' << fmt(s.poa_mean) << ',' << fmt(s.poa_std) << ',' << s.poa_defined_sets << ','
        << (s.poa_max ? std::to_string(*s.poa_max) : "NA") << ',' << s.bound << ',' << fmt(s.exact_poa_mean) << ','
        << s.exact_defined_sets << '\n';
  }
}

void write_cells_csv_header(std::ostream& out) {
  out << "dataset,n,sigma,tau,kind,set,runs,converged,changes_mean,changes_mean_converged,changes_max,poa,"
         "exact_poa,truthful_scores\n";
}

void write_cells_csv(std::ostream& out, const SweepResult& r) {
  for (const auto& c : r.cells) {
    std::string scores;
    for (int v : r.truthful[static_cast<std::size_t>(c.set)].values())
      scores += (scores.empty() ? "" : " ") + std::to_string(v);
    out << csv_escape(r.config.dataset.name) << ',' << r.config.n << ',' << r.config.effective_sigma() << ','
        << c.tau << ',' << to_string(c.kind) << ',' << c.set << ',' << c.runs << ',' << c.converged << ','
        << fmt(c.changes_mean) << ','
        << (c.changes_mean_converged ? fmt(*c.changes_mean_converged) : std::string("NA")) << ',' << c.changes_max
        << ',' << (c.poa ? std::to_string(*c.poa) : "NA") << ','
        << (c.exact_poa ? std::to_string(*c.exact_poa) : "NA") << ',' << scores << '\n';
  }
}

void write_summary(std::ostream& out, const SweepResult& r) {
  const auto& cfg = r.config;
  out << cfg.dataset.name << " n=" << cfg.n << " sigma=" << cfg.effective_sigma() << "  (" << cfg.preference_sets
      << " preference sets x " << cfg.runs << " runs, seed " << cfg.master_seed << ", " << fmt(r.seconds, 1)
      << " s)\n";
  for (AgentKind k : cfg.kinds) {
    const auto mt = r.min_tau_all_converge(k);
    const MeanStd ch = r.vote_changes(k);
    out << "  " << to_string(k) << ": min tau with all runs converged = " << (mt ? std::to_string(*mt) : "none")
        << "; vote changes " << fmt(ch.mean, 2) << " +- " << fmt(ch.std, 2) << '\n';
  }
  out << "  tau";
  for (AgentKind k : cfg.kinds) out << "  | " << to_string(k) << ": conv  changes  PoA+";
  out << "  | bound\n";
  for (int tau : cfg.effective_taus()) {
    out << "  " << std::setw(3) << tau;
    int bound = 0;
    for (AgentKind k : cfg.kinds) {
      const SettingResult* s = r.setting(tau, k);
      bound = s->bound;
      out << "  | " << std::setw(6) << fmt(s->converged_fraction, 3) << "  " << std::setw(6) << fmt(s->changes_mean, 2)
          << "  " << fmt(s->poa_mean, 2) << "+-" << fmt(s->poa_std, 2);
      if (s->poa_defined_sets < s->sets) out << " (" << s->poa_defined_sets << " sets)";
    }
    out << "  | " << bound << '\n';
  }
  if (r.violations.empty()) {
    out << "  invariants: ok\n";
  } else {
    out << "  invariants: " << r.violations.size() << " violation(s)\n";
    for (std::size_t i = 0; i < std::min<std::size_t>(r.violations.size(), 10); ++i)
      out << "    " << r.violations[i] << '\n';
  }
}

namespace {

DatasetSpec parse_dataset(const nlohmann::json& j, const std::filesystem::path& base) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s.rfind("Uniform", 0) == 0) return DatasetSpec::uniform(std::stoi(s.substr(7)));
    throw std::invalid_argument("unknown dataset '" + s + "'");
  }
  if (j.contains("uniform")) {
    DatasetSpec d = DatasetSpec::uniform(j.at("uniform").get<int>());
    if (j.contains("name")) d.name = j.at("name").get<std::string>();
    return d;
  }
  if (j.contains("soc")) {
    std::filesystem::path p = j.at("soc").get<std::string>();
    if (p.is_relative() && !base.empty()) p = base / p;
    return DatasetSpec::soc(p.string(), j.value("name", p.stem().string()));
  }
  throw std::invalid_argument("dataset entry needs 'uniform' or 'soc'");
}

std::vector<int> parse_taus(const nlohmann::json& j) {
  if (j.is_array()) return j.get<std::vector<int>>();
  std::vector<int> out;
  for (int t = j.at("from").get<int>(); t <= j.at("to").get<int>(); ++t) out.push_back(t);
  return out;
}

}  // namespace

std::vector<ExperimentConfig> parse_plan(const nlohmann::json& plan, const std::filesystem::path& base) {
  try {
    static const std::vector<std::string> known = {"datasets", "dataset", "voters", "n", "tau", "kinds",
                                                   "preference_sets", "runs", "sigma", "master_seed",
                                                   "stop_rule", "threads"};
    for (auto it = plan.begin(); it != plan.end(); ++it)
      if (std::find(known.begin(), known.end(), it.key()) == known.end())
        throw std::invalid_argument("unknown key '" + it.key() + "'");

    ExperimentConfig base_cfg;
    if (plan.contains("kinds")) {
      base_cfg.kinds.clear();
      for (const auto& k : plan.at("kinds")) base_cfg.kinds.push_back(parse_agent_kind(k.get<std::string>()));
    }
    base_cfg.preference_sets = plan.value("preference_sets", base_cfg.preference_sets);
    base_cfg.runs = plan.value("runs", base_cfg.runs);
    base_cfg.master_seed = plan.value("master_seed", base_cfg.master_seed);
    base_cfg.threads = plan.value("threads", base_cfg.threads);
    if (plan.contains("sigma") && !plan.at("sigma").is_null()) base_cfg.sigma = plan.at("sigma").get<int>();
    if (plan.contains("stop_rule")) {
      const std::string s = plan.at("stop_rule").get<std::string>();
      if (s == "consensus")
        base_cfg.stop_rule = StopRule::Consensus;
      else if (s == "singleton")
        base_cfg.stop_rule = StopRule::Singleton;
      else
        throw std::invalid_argument("stop_rule must be 'consensus' or 'singleton'");
    }

    std::vector<DatasetSpec> datasets;
    if (plan.contains("datasets"))
      for (const auto& d : plan.at("datasets")) datasets.push_back(parse_dataset(d, base));
    if (plan.contains("dataset")) datasets.push_back(parse_dataset(plan.at("dataset"), base));
    if (datasets.empty()) throw std::invalid_argument("plan lists no datasets");

    std::vector<std::size_t> voters;
    if (plan.contains("voters")) voters = plan.at("voters").get<std::vector<std::size_t>>();
    if (plan.contains("n")) voters.push_back(plan.at("n").get<std::size_t>());
    if (voters.empty()) voters.push_back(base_cfg.n);

    std::vector<ExperimentConfig> out;
    for (const auto& d : datasets)
      for (std::size_t n : voters) {
        ExperimentConfig c = base_cfg;
        c.dataset = d;
        c.n = n;
        if (plan.contains("tau")) c.taus = parse_taus(plan.at("tau"));
        c.validate();
        out.push_back(std::move(c));
      }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad experiment plan: ") + e.what());
  }
}

}  // namespace cud
