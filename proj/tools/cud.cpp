// cud: command-line front end for the simulator, oracle, experiments and game server.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <pthread.h>

#include <CLI11.hpp>

#include "cud/checks.hpp"
#include "cud/dataset.hpp"
#include "cud/event_store.hpp"
#include "cud/game.hpp"
#include "cud/oracle.hpp"
#include "cud/protocol.hpp"
#include "cud/server.hpp"
#include "cud/soc.hpp"
#include "cud/suites.hpp"
#include "cud/sweep.hpp"
#include "cud/trace_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cud;

namespace {

enum Exit { kOk = 0, kValidation = 2, kInvariant = 3, kIo = 4 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Where a command writes its main output: --out, or stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty() || path == "-") return;
    if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
    file_.open(path);
    if (!file_) throw IoError("cannot write " + path);
  }
  std::ostream& os() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  void close() {
    if (!file_.is_open()) return;
    file_.close();
    if (file_.fail()) throw IoError("write failed");
  }

 private:
  std::ofstream file_;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

SocData read_soc(const std::string& path) {
  if (!fs::is_regular_file(path)) throw IoError("cannot open " + path);
  return parse_soc_file(path);
}

DatasetSpec dataset_spec(const std::string& s) {
  if (s.rfind("Uniform", 0) == 0) {
    int m = 0;
    try {
      std::size_t used = 0;
      m = std::stoi(s.substr(7), &used);
      if (used != s.size() - 7) throw std::invalid_argument(s);
    } catch (const std::logic_error&) {
      throw std::invalid_argument("dataset must be UniformK or a SOC file path");
    }
    return DatasetSpec::uniform(m);
  }
  if (!fs::is_regular_file(s)) throw IoError("cannot open " + s);
  return DatasetSpec::soc(s, fs::path(s).stem().string());
}

StopRule parse_stop_rule(const std::string& s) {
  if (s == "consensus") return StopRule::Consensus;
  if (s == "singleton") return StopRule::Singleton;
  throw std::invalid_argument("stop rule must be consensus or singleton");
}

std::vector<AgentKind> parse_kinds(const std::string& s) {
  if (s == "both") return {AgentKind::Lazy, AgentKind::Proactive};
  return {parse_agent_kind(s)};
}

// ---- profile selection shared by simulate and oracle -------------------------

struct ProfileArgs {
  std::string file;
  std::string random;  // "n,m"
  void add(CLI::App* app) {
    auto* f = app->add_option("--profile", file, "SOC file (PrefLib, either layout)");
    auto* r = app->add_option("--random", random, "impartial-culture profile as n,m (voters,candidates)");
    f->excludes(r);
  }
  PreferenceProfile load(std::uint64_t seed) const {
    if (!file.empty()) return read_soc(file).expand();
    if (random.empty()) throw std::invalid_argument("give --profile or --random");
    const auto comma = random.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("--random expects n,m");
    std::size_t n = 0;
    int m = 0;
    try {
      n = std::stoul(random.substr(0, comma));
      m = std::stoi(random.substr(comma + 1));
    } catch (const std::logic_error&) {
      throw std::invalid_argument("--random expects n,m");
    }
    if (n < 1) throw std::invalid_argument("--random needs at least one voter");
    Rng rng(derive_seed(seed, {hash_string("profile")}));
    return sample_profile(Dataset::load(DatasetSpec::uniform(m)), n, rng);
  }
};

RuleConfig make_rule(std::size_t n, std::optional<int> sigma, int tau) {
  RuleConfig r = RuleConfig::majority(n, sigma.value_or(static_cast<int>(n)), tau);
  r.validate(n);
  return r;
}

std::vector<VoterId> parse_picks(const std::string& s, std::size_t n) {
  std::vector<VoterId> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t v = 0;
    try {
      v = std::stoul(item);
    } catch (const std::logic_error&) {
      throw std::invalid_argument("--picks expects comma-separated voter numbers");
    }
    if (v < 1 || v > n) throw std::invalid_argument("--picks: voter " + item + " out of range 1.." + std::to_string(n));
    out.push_back(static_cast<VoterId>(v - 1));
  }
  return out;
}

// ---- commands --------------------------------------------------------------

struct Common {
  std::uint64_t seed = 1;
  std::string out;
  void add(CLI::App* app) {
    app->add_option("--seed", seed, "random seed")->capture_default_str();
    app->add_option("--out", out, "output path (default: stdout)");
  }
};

int cmd_simulate(const Common& c, const ProfileArgs& p, std::optional<int> sigma, int tau, const std::string& kind,
                 const std::string& stop, const std::string& picks, const std::string& format) {
  const PreferenceProfile profile = p.load(c.seed);
  const RuleConfig rule = make_rule(profile.voter_count(), sigma, tau);
  const AgentKind k = parse_agent_kind(kind);
  const StopRule sr = parse_stop_rule(stop);
  GameTrace trace;
  if (!picks.empty()) {
    ScriptedChooser chooser(parse_picks(picks, profile.voter_count()));
    trace = run_protocol(profile, rule, k, chooser, sr);
  } else {
    trace = run_protocol(profile, rule, k, c.seed, sr);
  }
  Sink sink(c.out);
  if (format == "json") {
    sink.os() << trace_to_json(profile, trace).dump(2) << '\n';
  } else {
    render_trace_table(sink.os(), profile, trace);
  }
  sink.close();
  return kOk;
}

int cmd_bot_game(const Common& c, const std::string& config_file) {
  game::GameConfig gc;
  gc.bot_fill = game::BotFill::BotsOnly;
  if (!config_file.empty()) gc = game::game_config_from_json(read_json_file(config_file), gc);
  if (gc.bot_fill != game::BotFill::BotsOnly) throw std::invalid_argument("--bot-game needs bot_fill bots_only");
  game::GameSession g("cli", gc, c.seed);
  g.start();
  while (g.phase() == game::Phase::Round) g.close_round();
  if (!c.out.empty()) {
    Sink sink(c.out);
    for (const auto& ev : g.log()) sink.os() << ev.dump() << '\n';
    sink.close();
  }
  std::cout << game::to_json(g.metrics()).dump(2) << '\n';
  return kOk;
}

int cmd_oracle(const Common& c, const ProfileArgs& p, std::optional<int> sigma, int tau, const std::string& kinds,
               const std::string& stop, std::size_t max_states, const std::string& format) {
  const PreferenceProfile profile = p.load(c.seed);
  const RuleConfig rule = make_rule(profile.voter_count(), sigma, tau);
  oracle::Budget budget;
  budget.max_voters = 64;
  budget.max_candidates = CandidateSet::kMaxCandidates;
  budget.max_tau = 1 << 20;
  budget.max_states = max_states;
  const ScoreVector truthful = compute_scores(truthful_ballots(profile), profile.candidate_count());
  const auto bound = oracle::theorem3_bound(profile.voter_count(), rule.sigma, rule.tau);
  json out = {{"voters", profile.voter_count()},
              {"candidates", profile.candidates.names()},
              {"sigma", rule.sigma},
              {"tau", rule.tau},
              {"truthful_scores", truthful.values()},
              {"bound_case", bound.bound_case},
              {"bound", bound.bound},
              {"kinds", json::array()}};
  bool within = true;
  for (AgentKind k : parse_kinds(kinds)) {
    const auto r = oracle::enumerate(profile, rule, k, budget, parse_stop_rule(stop));
    const auto poa = oracle::poa_from(truthful, r.winners);
    within = within && (!poa || *poa <= bound.bound);
    json winners = json::array();
    for (Candidate w : r.winners.members()) winners.push_back(profile.candidates.name(w));
    out["kinds"].push_back({{"kind", std::string(to_string(k))},
                            {"winners", winners},
                            {"default_reachable", r.default_reachable},
                            {"poa", poa ? json(*poa) : json(nullptr)},
                            {"branches", r.branch_count},
                            {"states", r.distinct_states}});
  }
  Sink sink(c.out);
  if (format == "json") {
    sink.os() << out.dump(2) << '\n';
  } else {
    auto& os = sink.os();
    os << "n=" << profile.voter_count() << " sigma=" << rule.sigma << " tau=" << rule.tau
       << "  truthful " << format_scores(truthful) << "\n";
    os << "bound: case " << bound.bound_case << ", PoA+ <= " << bound.bound << "\n";
    for (const auto& k : out["kinds"]) {
      os << k["kind"].get<std::string>() << ": winners {";
      for (std::size_t i = 0; i < k["winners"].size(); ++i) os << (i ? "," : "") << k["winners"][i].get<std::string>();
      os << "}" << (k["default_reachable"].get<bool>() ? " + psi" : "") << "  PoA+ "
         << (k["poa"].is_null() ? std::string("N/A") : std::to_string(k["poa"].get<int>())) << "  ("
         << k["branches"] << " branches, " << k["states"] << " states)\n";
    }
  }
  sink.close();
  if (!within) throw InvariantError("exact PoA+ exceeds the worst-case bound");
  return kOk;
}

int cmd_verify(const Common& c, const std::string& suite, std::size_t budget, int runs) {
  oracle::SuiteOptions opt;
  opt.seed = c.seed;
  opt.budget.max_states = budget;
  opt.sampled_runs = runs;
  Sink sink(c.out.empty() ? "" : c.out);
  auto sink_fn = [&](const oracle::CheckResult& r) {
    if (!c.out.empty() || r.verdict == oracle::Verdict::Fail || r.verdict == oracle::Verdict::Finding)
      sink.os() << oracle::to_json(r).dump() << '\n';
  };
  std::vector<std::string> suites = {suite};
  if (suite == "all") suites = {"lemmas", "theorems", "tightness", "condorcet", "kinds"};
  bool ok = true;
  for (const auto& s : suites) {
    oracle::SuiteSummary sum;
    if (s == "lemmas") sum = oracle::run_lemma_suite(opt, sink_fn);
    else if (s == "theorems") sum = oracle::run_theorem_suite(opt, sink_fn);
    else if (s == "tightness") sum = oracle::run_tightness_suite(opt, sink_fn);
    else if (s == "condorcet") sum = oracle::run_condorcet_suite(opt, sink_fn);
    else if (s == "kinds") sum = oracle::run_kinds_suite(opt, sink_fn);
    else throw std::invalid_argument("unknown suite '" + s + "'");
    std::cerr << sum.suite << ": pass " << sum.pass << ", fail " << sum.fail << ", skip " << sum.skip
              << ", finding " << sum.finding << " (" << sum.seconds << " s)\n";
    ok = ok && sum.ok();
  }
  sink.close();
  if (!ok) throw InvariantError("verification failed");
  return kOk;
}

struct ExperimentArgs {
  std::string config;
  std::string dataset = "Uniform5";
  std::size_t voters = 10;
  std::vector<int> taus;
  std::string kinds = "both";
  int sets = 10;
  int runs = 1000;
  unsigned threads = 0;
  std::string stop = "consensus";
  bool no_exact = false;
};

int cmd_experiment(const Common& c, const ExperimentArgs& a) {
  std::vector<ExperimentConfig> configs;
  if (!a.config.empty()) {
    configs = parse_plan(read_json_file(a.config), fs::path(a.config).parent_path());
  } else {
    ExperimentConfig cfg;
    cfg.dataset = dataset_spec(a.dataset);
    cfg.n = a.voters;
    cfg.taus = a.taus;
    cfg.kinds = parse_kinds(a.kinds);
    cfg.preference_sets = a.sets;
    cfg.runs = a.runs;
    cfg.threads = a.threads;
    cfg.stop_rule = parse_stop_rule(a.stop);
    configs.push_back(cfg);
  }
  for (auto& cfg : configs) {
    // --seed always wins so one flag reproduces the whole plan
    cfg.master_seed = c.seed;
    if (a.no_exact) cfg.exact_check = false;
    if (a.threads) cfg.threads = a.threads;
    cfg.validate();
  }
  const fs::path dir = c.out.empty() ? fs::path("results") : fs::path(c.out);
  fs::create_directories(dir);
  std::ofstream settings(dir / "settings.csv"), cells(dir / "cells.csv"), summary(dir / "summary.txt");
  if (!settings || !cells || !summary) throw IoError("cannot write into " + dir.string());
  write_settings_csv_header(settings);
  write_cells_csv_header(cells);
  settings.flush();
  cells.flush();
  std::size_t violations = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto& cfg = configs[i];
    std::cerr << "[" << i + 1 << "/" << configs.size() << "] " << cfg.dataset.name << " n=" << cfg.n << " ..."
              << std::flush;
    const SweepResult r = run_sweep(cfg);
    std::cerr << " " << r.seconds << " s\n";
    write_settings_csv(settings, r);
    write_cells_csv(cells, r);
    write_summary(summary, r);
    settings.flush();
    cells.flush();
    summary.flush();
    if (!settings || !cells || !summary) throw IoError("write failed in " + dir.string());
    violations += r.violations.size();
    for (const auto& v : r.violations) std::cerr << "violation: " << v << '\n';
  }
  std::cout << "wrote " << (dir / "settings.csv").string() << ", " << (dir / "cells.csv").string() << ", "
            << (dir / "summary.txt").string() << '\n';
  if (violations) throw InvariantError(std::to_string(violations) + " invariant violations");
  return kOk;
}

int cmd_serve(const Common& c, const std::string& config, const std::string& listen, bool seed_given) {
  server::ServerConfig sc;
  if (!config.empty()) sc = server::server_config_from_json(read_json_file(config));
  server::apply_env(sc, [](const char* k) { return std::getenv(k); });
  if (!listen.empty()) sc.listen = listen;
  if (!c.out.empty()) sc.storage = c.out;
  if (seed_given) sc.seed = c.seed;
  sc.validate();

  sigset_t sigs;
  sigemptyset(&sigs);
  sigaddset(&sigs, SIGINT);
  sigaddset(&sigs, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &sigs, nullptr);

  server::Server srv(sc);
  unsigned short port = 0;
  try {
    port = srv.start();
  } catch (const std::exception& e) {
    throw IoError(std::string("cannot listen on ") + sc.listen + ": " + e.what());
  }
  std::cout << "listening on " << sc.listen.substr(0, sc.listen.rfind(':')) << ":" << port << ", storage "
            << sc.storage.string() << std::endl;
  std::thread loop([&] { srv.run(); });
  int sig = 0;
  sigwait(&sigs, &sig);
  srv.stop();
  loop.join();
  return kOk;
}

int cmd_replay(const Common& c, const std::string& log, bool seed_given) {
  if (!fs::is_regular_file(log)) throw IoError("cannot open " + log);
  const auto events = game::read_event_log_file(log);
  const game::GameSession g = game::GameSession::replay(events);
  if (seed_given && g.seed() != c.seed)
    throw std::invalid_argument("log was played with seed " + std::to_string(g.seed()));
  json out = {{"id", g.id()}, {"seed", g.seed()}, {"events", events.size()},
              {"phase", std::string(game::to_string(g.phase()))}};
  if (g.phase() != game::Phase::Finished) throw game::ReplayError("log ends before the game finished");
  out["metrics"] = game::to_json(g.metrics());
  Sink sink(c.out);
  sink.os() << out.dump(2) << '\n';
  sink.close();
  return kOk;
}

struct GenArgs {
  std::string family = "random";
  std::string dataset = "Uniform5";
  std::size_t voters = 10;
  int count = 1;
  int bound_case = 2;
  std::optional<int> sigma;
  int tau = 0;
  int candidates = 4;
};

int cmd_gen(const Common& c, const GenArgs& a) {
  std::vector<std::pair<std::string, PreferenceProfile>> profiles;
  if (a.family == "random") {
    if (a.count < 1) throw std::invalid_argument("--count must be >= 1");
    const Dataset ds = Dataset::load(dataset_spec(a.dataset));
    ExperimentConfig cfg;
    cfg.dataset = dataset_spec(a.dataset);
    cfg.n = a.voters;
    cfg.master_seed = c.seed;
    for (int i = 0; i < a.count; ++i) {
      // same draws as preference set i of an experiment with this seed
      Rng rng(profile_seed(cfg, i));
      profiles.emplace_back(ds.name() + " n=" + std::to_string(a.voters) + " set " + std::to_string(i),
                            sample_profile(ds, a.voters, rng));
    }
  } else if (a.family == "tightness") {
    const int sigma = a.sigma.value_or(static_cast<int>(a.voters));
    profiles.emplace_back("worst case " + std::to_string(a.bound_case),
                          oracle::gen_tightness_profile(a.bound_case, a.voters, sigma, a.tau));
  } else if (a.family == "condorcet") {
    profiles.emplace_back("second-choice consensus", oracle::condorcet_counterexample(a.voters, a.candidates));
  } else {
    throw std::invalid_argument("family must be random, tightness or condorcet");
  }
  if (profiles.size() == 1 || c.out.empty() || c.out == "-") {
    Sink sink(c.out);
    for (const auto& [title, p] : profiles) write_soc(sink.os(), p, title);
    sink.close();
    return kOk;
  }
  fs::create_directories(c.out);
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "profile_%03zu.soc", i);
    Sink sink((fs::path(c.out) / name).string());
    write_soc(sink.os(), profiles[i].second, profiles[i].first);
    sink.close();
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consensus under a deadline: simulator, oracle, experiments and game server"};
  app.require_subcommand(1);

  Common common;
  ProfileArgs prof;
  std::optional<int> sigma;
  int tau = 0;
  std::string kind = "lazy", stop = "consensus", picks, format = "table", game_config;
  bool bot_game = false;

  auto* sim = app.add_subcommand("simulate", "run the protocol once and print the step table");
  common.add(sim);
  prof.add(sim);
  sim->add_option("--sigma", sigma, "consensus threshold (default n)");
  sim->add_option("--tau", tau, "deadline")->capture_default_str();
  sim->add_option("--kind", kind, "lazy | proactive")->capture_default_str();
  sim->add_option("--stop-rule", stop, "consensus | singleton")->capture_default_str();
  sim->add_option("--picks", picks, "forced picks, 1-based voter numbers in order");
  sim->add_option("--format", format, "table | json")->check(CLI::IsMember({"table", "json"}));
  sim->add_flag("--bot-game", bot_game, "play a bot-only game; --out receives the event log");
  sim->add_option("--game-config", game_config, "game config JSON for --bot-game");

  std::string kinds = "both";
  std::size_t max_states = 4'000'000;
  auto* ora = app.add_subcommand("oracle", "enumerate every random branch of one instance");
  common.add(ora);
  prof.add(ora);
  ora->add_option("--sigma", sigma, "consensus threshold (default n)");
  ora->add_option("--tau", tau, "deadline")->capture_default_str();
  ora->add_option("--kind", kinds, "lazy | proactive | both")->capture_default_str();
  ora->add_option("--stop-rule", stop, "consensus | singleton")->capture_default_str();
  ora->add_option("--budget", max_states, "maximum distinct states")->capture_default_str();
  ora->add_option("--format", format, "table | json")->check(CLI::IsMember({"table", "json"}));

  std::string suite = "all";
  int runs = 10'000;
  auto* ver = app.add_subcommand("verify", "run the property suites; JSONL records go to --out");
  common.add(ver);
  ver->add_option("--suite", suite, "lemmas | theorems | tightness | condorcet | kinds | all")
      ->check(CLI::IsMember({"lemmas", "theorems", "tightness", "condorcet", "kinds", "all"}))
      ->capture_default_str();
  ver->add_option("--budget", max_states, "maximum distinct states per enumeration")->capture_default_str();
  ver->add_option("--runs", runs, "seeded engine runs for sampled checks")->capture_default_str();

  ExperimentArgs ex;
  auto* exp = app.add_subcommand("experiment", "run sweeps; --out is a directory for the CSVs");
  common.add(exp);
  exp->add_option("--config", ex.config, "plan file (JSON)");
  exp->add_option("--dataset", ex.dataset, "UniformK or a SOC file")->capture_default_str();
  exp->add_option("--voters", ex.voters, "voters per election")->capture_default_str();
  exp->add_option("--tau", ex.taus, "deadlines (default 2..n+1)");
  exp->add_option("--kind", ex.kinds, "lazy | proactive | both")->capture_default_str();
  exp->add_option("--sets", ex.sets, "preference sets")->capture_default_str();
  exp->add_option("--runs", ex.runs, "runs per set and setting")->capture_default_str();
  exp->add_option("--threads", ex.threads, "worker threads (0: all cores)");
  exp->add_option("--stop-rule", ex.stop, "consensus | singleton")->capture_default_str();
  exp->add_flag("--no-exact", ex.no_exact, "skip the per-cell exact enumeration");

  std::string serve_config, listen;
  auto* srv = app.add_subcommand("serve", "run the game server; --out is the storage directory");
  common.add(srv);
  srv->add_option("--config", serve_config, "server config JSON");
  srv->add_option("--listen", listen, "host:port");

  std::string log;
  auto* rep = app.add_subcommand("replay", "replay a stored game log and print its metrics");
  common.add(rep);
  rep->add_option("--log", log, "event log (JSONL)")->required();

  GenArgs gen;
  auto* gp = app.add_subcommand("gen-profiles", "write preference profiles as SOC files");
  common.add(gp);
  gp->add_option("--family", gen.family, "random | tightness | condorcet")->capture_default_str();
  gp->add_option("--dataset", gen.dataset, "UniformK or a SOC file (random)")->capture_default_str();
  gp->add_option("--voters", gen.voters, "voters")->capture_default_str();
  gp->add_option("--count", gen.count, "profiles to draw (random)")->capture_default_str();
  gp->add_option("--case", gen.bound_case, "bound case 2 or 3 (tightness)")->capture_default_str();
  gp->add_option("--sigma", gen.sigma, "threshold (tightness, default n)");
  gp->add_option("--tau", gen.tau, "deadline (tightness)")->capture_default_str();
  gp->add_option("--candidates", gen.candidates, "candidates (condorcet)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  auto seed_given = [&](CLI::App* sub) { return sub->count("--seed") > 0; };
  try {
    if (*sim) {
      if (bot_game) return cmd_bot_game(common, game_config);
      return cmd_simulate(common, prof, sigma, tau, kind, stop, picks, format);
    }
    if (*ora) return cmd_oracle(common, prof, sigma, tau, kinds, stop, max_states, format);
    if (*ver) return cmd_verify(common, suite, max_states, runs);
    if (*exp) return cmd_experiment(common, ex);
    if (*srv) return cmd_serve(common, serve_config, listen, seed_given(srv));
    if (*rep) return cmd_replay(common, log, seed_given(rep));
    if (*gp) return cmd_gen(common, gen);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const InvariantError& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kInvariant;
  } catch (const game::ReplayError& e) {
    std::cerr << "replay failed: " << e.what() << '\n';
    return kInvariant;
  } catch (const oracle::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kValidation;
  } catch (const SocParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const game::LogParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const ContractViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  }
  return kOk;
}
