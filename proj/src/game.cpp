#include "cud/game.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "cud/agent.hpp"

namespace cud::game {

using nlohmann::json;

namespace {

Preference parse_order(const CandidateSet& cs, const std::vector<std::string>& names) {
  if (static_cast<int>(names.size()) != cs.size())
    throw std::invalid_argument("preference must rank all " + std::to_string(cs.size()) + " cards");
  std::vector<Candidate> ranking;
  for (const auto& n : names) {
    const auto c = cs.find(n);
    if (!c || !cs.is_valid(*c)) throw std::invalid_argument("unknown card '" + n + "'");
    ranking.push_back(*c);
  }
  return Preference(std::move(ranking));  // rejects repeats
}

std::vector<std::string> order_names(const CandidateSet& cs, const Preference& p) {
  std::vector<std::string> out;
  for (Candidate c : p.ranking()) out.push_back(cs.name(c));
  return out;
}

std::vector<Preference> all_permutations(int m) {
  std::vector<Candidate> r;
  for (int i = 0; i < m; ++i) r.push_back(Candidate{i});
  std::vector<Preference> out;
  do out.emplace_back(r);
  while (std::next_permutation(r.begin(), r.end()));
  return out;
}

// replay compares what the transition derives with what the log says
void settle(json& ev, const char* key, const json& derived, bool replaying) {
  if (!replaying) {
    ev[key] = derived;
    return;
  }
  if (!ev.contains(key) || ev.at(key) != derived)
    throw ReplayError("event " + std::to_string(ev.value("seq", -1)) + " (" + ev.value("type", std::string("?")) +
                      "): field '" + key + "' does not match the replayed game");
}

json opt_name(const CandidateSet& cs, std::optional<Candidate> c) { return c ? json(cs.name(*c)) : json(nullptr); }

}  // namespace

std::string_view to_string(BotFill f) {
  switch (f) {
    case BotFill::None: return "none";
    case BotFill::Mixed: return "mixed";
    case BotFill::BotsOnly: return "bots_only";
  }
  return "?";
}

BotFill parse_bot_fill(std::string_view s) {
  if (s == "none") return BotFill::None;
  if (s == "mixed") return BotFill::Mixed;
  if (s == "bots_only") return BotFill::BotsOnly;
  throw std::invalid_argument("bot fill must be none, mixed or bots_only");
}

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::Lobby: return "lobby";
    case Phase::Round: return "round";
    case Phase::Finished: return "finished";
  }
  return "?";
}

void GameConfig::validate() const {
  if (seats < 1 || seats > 64) throw std::invalid_argument("seats must be between 1 and 64");
  if (cards.size() < 2) throw std::invalid_argument("a game needs at least 2 cards");
  const CandidateSet cs(cards);  // checks uniqueness and size
  if (tau < 0) throw std::invalid_argument("tau must be >= 0");
  if (round_seconds < 0) throw std::invalid_argument("round_seconds must be >= 0");
  if (bot_fill == BotFill::Mixed && (min_humans < 1 || min_humans > seats))
    throw std::invalid_argument("min_humans must be between 1 and seats");
  for (const auto& o : preference_pool) parse_order(cs, o);
  if (profile) {
    if (static_cast<int>(profile->size()) != seats) throw std::invalid_argument("profile must list one order per seat");
    for (const auto& o : *profile) parse_order(cs, o);
  }
}

json to_json(const GameConfig& c) {
  json j = {{"seats", c.seats},
            {"cards", c.cards},
            {"tau", c.tau},
            {"round_seconds", c.round_seconds},
            {"bot_fill", std::string(to_string(c.bot_fill))},
            {"min_humans", c.min_humans},
            {"preference_pool", c.preference_pool}};
  j["profile"] = c.profile ? json(*c.profile) : json(nullptr);
  return j;
}

GameConfig game_config_from_json(const json& j, const GameConfig& base) {
  static const std::set<std::string> known = {"seats",     "cards",      "tau",             "round_seconds",
                                              "bot_fill",  "min_humans", "preference_pool", "profile"};
  if (!j.is_object()) throw std::invalid_argument("game config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw std::invalid_argument("unknown game config key '" + it.key() + "'");
  GameConfig c = base;
  try {
    c.seats = j.value("seats", c.seats);
    c.cards = j.value("cards", c.cards);
    c.tau = j.value("tau", c.tau);
    c.round_seconds = j.value("round_seconds", c.round_seconds);
    if (j.contains("bot_fill")) c.bot_fill = parse_bot_fill(j.at("bot_fill").get<std::string>());
    c.min_humans = j.value("min_humans", c.min_humans);
    c.preference_pool = j.value("preference_pool", c.preference_pool);
    if (j.contains("profile"))
      c.profile = j.at("profile").is_null()
                      ? std::nullopt
                      : std::optional(j.at("profile").get<std::vector<std::vector<std::string>>>());
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad game config: ") + e.what());
  }
  c.validate();
  return c;
}

int reward(int rank, int m, bool converged) {
  if (m < 1 || rank < 1 || rank > m) throw ContractViolation("reward: rank must be in 1..m");
  if (!converged) return 0;
  return static_cast<int>(std::lround(100.0 * (m - rank + 1) / m));
}

Flags classify_action(const Preference& pref, const ScoreVector& tallies, Candidate target) {
  Flags f;
  const int top = tallies.max();
  f.oa = true;
  for (int i = 0; i < tallies.size(); ++i) {
    const Candidate c{i};
    if (tallies[c] == top && !pref.prefers(c, target)) f.oa = false;
    if (pref.prefers(c, target) && tallies[c] > tallies[target]) f.ia = true;
  }
  return f;
}

json to_json(const GameMetrics& m) {
  return {{"converged", m.converged},
          {"winner", m.winner ? json(*m.winner) : json(nullptr)},
          {"rounds_used", m.rounds_used},
          {"avg_reward", m.avg_reward},
          {"rewards", m.rewards},
          {"por", m.por ? json(*m.por) : json(nullptr)},
          {"oa_actions", m.oa_actions},
          {"ia_actions", m.ia_actions},
          {"irrational_actions", m.irrational_actions},
          {"changes", m.changes}};
}

GameMetrics metrics_from_json(const json& j) {
  GameMetrics m;
  m.converged = j.at("converged").get<bool>();
  if (!j.at("winner").is_null()) m.winner = j.at("winner").get<std::string>();
  m.rounds_used = j.at("rounds_used").get<int>();
  m.avg_reward = j.at("avg_reward").get<double>();
  m.rewards = j.at("rewards").get<std::vector<int>>();
  if (!j.at("por").is_null()) m.por = j.at("por").get<int>();
  m.oa_actions = j.at("oa_actions").get<int>();
  m.ia_actions = j.at("ia_actions").get<int>();
  m.irrational_actions = j.at("irrational_actions").get<int>();
  m.changes = j.at("changes").get<int>();
  return m;
}

// ---- session ---------------------------------------------------------------

GameSession::GameSession(std::string id, GameConfig config, std::uint64_t seed) {
  config.validate();
  emit({{"type", "created"}, {"id", std::move(id)}, {"config", to_json(config)}, {"seed", seed}});
}

std::string GameSession::hash_token(const std::string& token) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_string(token)));
  return buf;
}

void GameSession::emit(json ev) {
  ev["seq"] = log_.size();
  apply(ev, false);
  log_.push_back(std::move(ev));
}

void GameSession::require_phase(Phase p, const char* what) const {
  if (phase_ != p) {
    if (phase_ == Phase::Finished) throw GameError("game_over", std::string(what) + ": the game is over");
    if (p == Phase::Lobby) throw GameError("game_started", std::string(what) + ": the game already started");
    throw GameError("not_started", std::string(what) + ": the game has not started");
  }
}

std::size_t GameSession::human_count() const {
  return static_cast<std::size_t>(std::count_if(seats_.begin(), seats_.end(), [](const Seat& s) { return !s.bot; }));
}

bool GameSession::ready_to_start() const {
  if (phase_ != Phase::Lobby) return false;
  const auto humans = static_cast<int>(human_count());
  switch (config_.bot_fill) {
    case BotFill::BotsOnly: return true;
    case BotFill::Mixed: return humans >= config_.min_humans;
    case BotFill::None: return humans == config_.seats;
  }
  return false;
}

std::optional<std::size_t> GameSession::seat_of(const std::string& token) const {
  const std::string h = hash_token(token);
  for (std::size_t i = 0; i < seats_.size(); ++i)
    if (!seats_[i].bot && seats_[i].identity == h) return i;
  return std::nullopt;
}

std::size_t GameSession::join(const std::string& name, const std::string& token) {
  require_phase(Phase::Lobby, "join");
  if (config_.bot_fill == BotFill::BotsOnly) throw GameError("bots_only", "join: this session is for bots only");
  if (static_cast<int>(seats_.size()) >= config_.seats) throw GameError("session_full", "join: the session is full");
  if (token.empty()) throw GameError("bad_token", "join: a token is required");
  if (seat_of(token)) throw GameError("duplicate_identity", "join: this player already has a seat");
  const std::size_t seat = seats_.size();
  emit({{"type", "joined"}, {"seat", seat}, {"name", name}, {"identity", hash_token(token)}});
  if (ready_to_start()) start();
  return seat;
}

void GameSession::start() {
  require_phase(Phase::Lobby, "start");
  if (config_.bot_fill == BotFill::None && static_cast<int>(seats_.size()) < config_.seats)
    throw GameError("not_enough_players", "start: human-only games need every seat filled");
  emit({{"type", "started"}});
  open_round();
}

void GameSession::open_round() {
  if (winner_ || t_ == 0)
    emit({{"type", "finished"}});
  else
    emit({{"type", "round_opened"}});
}

bool GameSession::has_acted(std::size_t seat) const { return seat < acted_.size() && acted_[seat]; }

bool GameSession::all_humans_acted() const {
  for (std::size_t i = 0; i < seats_.size(); ++i)
    if (!seats_[i].bot && !has_acted(i)) return false;
  return true;
}

Flags GameSession::submit(std::size_t seat, int round, std::optional<Candidate> to) {
  require_phase(Phase::Round, "action");
  if (seat >= seats_.size() || seats_[seat].bot) throw GameError("bad_seat", "action: no such player");
  if (round != t_) throw GameError("wrong_round", "action: round " + std::to_string(round) + " is not the current round " +
                                                     std::to_string(t_));
  if (has_acted(seat)) throw GameError("already_acted", "action: one action per round");
  if (to && !candidates_.is_valid(*to)) throw GameError("bad_candidate", "action: unknown card");
  if (to == ballots_[seat]) to.reset();
  emit({{"type", "action"}, {"seat", seat}, {"round", round}, {"to", opt_name(candidates_, to)}});
  return actions_.back().flags;
}

const RoundRecord& GameSession::close_round() {
  require_phase(Phase::Round, "close_round");
  emit({{"type", "round_closed"}});
  const std::size_t idx = rounds_.size() - 1;
  open_round();
  return rounds_[idx];
}

std::vector<int> GameSession::values(std::size_t seat) const {
  const Preference& p = seats_.at(seat).preference;
  std::vector<int> v(static_cast<std::size_t>(candidates_.size()));
  for (int c = 0; c < candidates_.size(); ++c)
    v[static_cast<std::size_t>(c)] = reward(p.rank(Candidate{c}) + 1, candidates_.size(), true);
  return v;
}

GameMetrics GameSession::metrics() const {
  if (phase_ != Phase::Finished) throw GameError("not_finished", "metrics: the game has not finished");
  return compute_metrics();
}

GameMetrics GameSession::compute_metrics() const {
  GameMetrics m;
  m.converged = winner_.has_value();
  if (winner_) m.winner = candidates_.name(*winner_);
  m.rounds_used = config_.tau - t_;
  const int mm = candidates_.size();
  for (const Seat& s : seats_) {
    const int r = winner_ ? s.preference.rank(*winner_) + 1 : 1;
    m.rewards.push_back(reward(r, mm, m.converged));
  }
  double sum = 0.0;
  for (int r : m.rewards) sum += r;
  m.avg_reward = m.rewards.empty() ? 0.0 : sum / static_cast<double>(m.rewards.size());
  if (winner_) m.por = truthful_.max() - truthful_[*winner_];
  for (const ActionRecord& a : actions_) {
    m.oa_actions += a.flags.oa;
    m.ia_actions += a.flags.ia;
    m.irrational_actions += a.flags.any();
  }
  for (const RoundRecord& r : rounds_) m.changes += r.picked.has_value();
  return m;
}

// ---- transitions -----------------------------------------------------------

void GameSession::apply(json& ev, bool replaying) {
  const std::string type = ev.at("type").get<std::string>();
  if (type == "created") {
    if (!log_.empty()) throw ReplayError("'created' must be the first event");
    id_ = ev.at("id").get<std::string>();
    try {
      config_ = game_config_from_json(ev.at("config"));
    } catch (const std::invalid_argument& e) {
      throw ReplayError(std::string("bad config in log: ") + e.what());
    }
    seed_ = ev.at("seed").get<std::uint64_t>();
    rng_ = Rng(seed_);
    candidates_ = CandidateSet(config_.cards);
    if (config_.preference_pool.empty())
      pool_ = all_permutations(candidates_.size());
    else
      for (const auto& o : config_.preference_pool) pool_.push_back(parse_order(candidates_, o));
    phase_ = Phase::Lobby;
    t_ = config_.tau;
    return;
  }
  if (log_.empty()) throw ReplayError("log must start with 'created'");

  if (type == "joined") {
    if (phase_ != Phase::Lobby) throw ReplayError("join after the game started");
    if (ev.at("seat").get<std::size_t>() != seats_.size()) throw ReplayError("seat numbers out of order");
    if (static_cast<int>(seats_.size()) >= config_.seats) throw ReplayError("more joins than seats");
    Seat s;
    s.name = ev.at("name").get<std::string>();
    s.identity = ev.at("identity").get<std::string>();
    for (const Seat& o : seats_)
      if (o.identity == s.identity) throw ReplayError("duplicate identity in log");
    seats_.push_back(std::move(s));
  } else if (type == "started") {
    apply_started(ev, replaying);
  } else if (type == "round_opened") {
    apply_round_opened(ev, replaying);
  } else if (type == "action") {
    apply_action(ev, replaying);
  } else if (type == "round_closed") {
    apply_round_closed(ev, replaying);
  } else if (type == "finished") {
    apply_finished(ev, replaying);
  } else {
    throw ReplayError("unknown event type '" + type + "'");
  }
}

void GameSession::apply_started(json& ev, bool replaying) {
  if (phase_ != Phase::Lobby || finished_) throw ReplayError("'started' outside the lobby");
  const int humans = static_cast<int>(seats_.size());
  if (config_.bot_fill == BotFill::None && humans < config_.seats) throw ReplayError("human-only game started early");
  for (int i = humans; i < config_.seats; ++i) {
    Seat b;
    b.name = "Player " + std::to_string(i + 1);
    b.bot = true;
    seats_.push_back(std::move(b));
  }
  json seats = json::array(), prefs = json::array();
  for (std::size_t i = 0; i < seats_.size(); ++i) {
    Seat& s = seats_[i];
    s.preference = config_.profile ? parse_order(candidates_, (*config_.profile)[i])
                                   : pool_[static_cast<std::size_t>(rng_.uniform_index(pool_.size()))];
    seats.push_back({{"name", s.name}, {"bot", s.bot}});
    prefs.push_back(order_names(candidates_, s.preference));
  }
  settle(ev, "seats", seats, replaying);
  settle(ev, "preferences", prefs, replaying);

  ballots_.clear();
  for (const Seat& s : seats_) ballots_.push_back(s.preference.top());
  tallies_ = compute_scores(ballots_, candidates_.size());
  truthful_ = tallies_;
  if (tallies_.max() >= config_.sigma()) winner_ = Candidate{static_cast<int>(
      std::max_element(tallies_.values().begin(), tallies_.values().end()) - tallies_.values().begin())};
  phase_ = Phase::Round;
}

void GameSession::apply_round_opened(json& ev, bool replaying) {
  if (phase_ != Phase::Round || winner_ || t_ == 0 || finished_) throw ReplayError("'round_opened' out of place");
  const RuleConfig rule = RuleConfig::majority(seats_.size(), config_.sigma(), config_.tau);
  pending_.assign(seats_.size(), std::nullopt);
  acted_.assign(seats_.size(), false);
  json bots = json::array();
  for (std::size_t i = 0; i < seats_.size(); ++i) {
    if (!seats_[i].bot) continue;
    acted_[i] = true;
    const Candidate br = best_response(AgentKind::Lazy, seats_[i].preference, ballots_[i], tallies_, t_, rule);
    if (br == ballots_[i]) continue;
    pending_[i] = br;
    actions_.push_back(ActionRecord{i, t_, br, classify_action(seats_[i].preference, tallies_, br)});
    bots.push_back({{"seat", i}, {"to", candidates_.name(br)}});
  }
  settle(ev, "t", t_, replaying);
  settle(ev, "bot_applications", bots, replaying);
  RoundRecord r;
  r.t = t_;
  r.tallies = tallies_;
  rounds_.push_back(std::move(r));
  open_ = true;
}

void GameSession::apply_action(json& ev, bool replaying) {
  if (phase_ != Phase::Round || !open_) throw ReplayError("action outside an open round");
  const std::size_t seat = ev.at("seat").get<std::size_t>();
  const int round = ev.at("round").get<int>();
  if (seat >= seats_.size() || seats_[seat].bot) throw ReplayError("action from a non-player seat");
  if (round != t_) throw ReplayError("action for the wrong round");
  if (acted_[seat]) throw ReplayError("second action in one round");
  std::optional<Candidate> to;
  if (!ev.at("to").is_null()) {
    to = candidates_.find(ev.at("to").get<std::string>());
    if (!to || !candidates_.is_valid(*to)) throw ReplayError("action names an unknown card");
  }
  acted_[seat] = true;
  ActionRecord a{seat, round, to, {}};
  if (to) {
    a.flags = classify_action(seats_[seat].preference, tallies_, *to);
    pending_[seat] = to;
  }
  settle(ev, "flags", json{{"oa", a.flags.oa}, {"ia", a.flags.ia}}, replaying);
  actions_.push_back(a);
}

void GameSession::apply_round_closed(json& ev, bool replaying) {
  if (phase_ != Phase::Round || !open_) throw ReplayError("'round_closed' without an open round");
  RoundRecord& r = rounds_.back();
  for (std::size_t i = 0; i < pending_.size(); ++i)
    if (pending_[i]) r.applicants.push_back(i);
  json picked = nullptr, change = nullptr;
  if (!r.applicants.empty()) {
    const std::size_t who = r.applicants[static_cast<std::size_t>(rng_.uniform_index(r.applicants.size()))];
    r.picked = who;
    r.from = ballots_[who];
    r.to = *pending_[who];
    tallies_.move(*r.from, *r.to);
    ballots_[who] = *r.to;
    picked = who;
    change = {{"seat", who}, {"from", candidates_.name(*r.from)}, {"to", candidates_.name(*r.to)}};
  }
  settle(ev, "t", r.t, replaying);
  settle(ev, "applicants", r.applicants, replaying);
  settle(ev, "picked", picked, replaying);
  settle(ev, "change", change, replaying);
  --t_;
  open_ = false;
  for (int c = 0; c < tallies_.size(); ++c)
    if (tallies_[Candidate{c}] >= config_.sigma()) winner_ = Candidate{c};
}

void GameSession::apply_finished(json& ev, bool replaying) {
  if (phase_ != Phase::Round || open_ || finished_) throw ReplayError("'finished' out of place");
  if (!winner_ && t_ != 0) throw ReplayError("'finished' before consensus or deadline");
  settle(ev, "winner", opt_name(candidates_, winner_), replaying);
  settle(ev, "metrics", to_json(compute_metrics()), replaying);
  phase_ = Phase::Finished;
  finished_ = true;
}

GameSession GameSession::replay(const std::vector<json>& events) {
  GameSession s;
  try {
    for (std::size_t i = 0; i < events.size(); ++i) {
      json ev = events[i];
      if (!ev.is_object() || !ev.contains("seq") || !ev.contains("type"))
        throw ReplayError("event " + std::to_string(i) + " is malformed");
      if (ev.at("seq").get<std::size_t>() != i)
        throw ReplayError("event " + std::to_string(i) + " is out of order (seq " + ev.at("seq").dump() + ")");
      s.apply(ev, true);
      s.log_.push_back(std::move(ev));
    }
  } catch (const json::exception& e) {
    throw ReplayError(std::string("malformed event: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ReplayError(std::string("invalid event: ") + e.what());
  }
  if (s.log_.empty()) throw ReplayError("empty log");
  // a started game must always have an open round or be finished
  if (s.phase_ == Phase::Round && !s.open_) throw ReplayError("log is truncated between rounds");
  return s;
}

}  // namespace cud::game
