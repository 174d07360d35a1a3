#include "cud/types.hpp"

#include <algorithm>
#include <numeric>

namespace cud {

CandidateSet::CandidateSet(std::vector<std::string> names, std::string default_name)
    : names_(std::move(names)), default_name_(std::move(default_name)) {
  if (names_.empty()) throw std::invalid_argument("candidate set needs at least one valid candidate");
  if (size() > kMaxCandidates) throw std::invalid_argument("too many candidates (max 63)");
  std::vector<std::string> sorted = names_;
  sorted.push_back(default_name_);
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("candidate names must be unique and differ from the default");
}

CandidateSet CandidateSet::lettered(int m) {
  if (m < 1) throw std::invalid_argument("candidate set needs at least one valid candidate");
  std::vector<std::string> names;
  for (int i = 0; i < m; ++i) {
    if (m <= 26)
      names.emplace_back(1, static_cast<char>('a' + i));
    else
      names.push_back("c" + std::to_string(i + 1));
  }
  return CandidateSet(std::move(names));
}

const std::string& CandidateSet::name(Candidate c) const {
  if (is_default(c)) return default_name_;
  if (!is_valid(c)) throw std::out_of_range("candidate id out of range");
  return names_[static_cast<std::size_t>(c.id)];
}

std::optional<Candidate> CandidateSet::find(std::string_view name) const {
  for (int i = 0; i < size(); ++i)
    if (names_[static_cast<std::size_t>(i)] == name) return Candidate{i};
  if (name == default_name_) return default_candidate();
  return std::nullopt;
}

Preference::Preference(std::vector<Candidate> ranking) : ranking_(std::move(ranking)) {
  const int m = static_cast<int>(ranking_.size());
  if (m < 1) throw std::invalid_argument("preference must rank at least one candidate");
  rank_.assign(static_cast<std::size_t>(m) + 1, -1);
  for (int pos = 0; pos < m; ++pos) {
    const int id = ranking_[static_cast<std::size_t>(pos)].id;
    if (id < 0 || id >= m) throw std::invalid_argument("preference ranks an unknown candidate");
    if (rank_[static_cast<std::size_t>(id)] != -1)
      throw std::invalid_argument("preference ranks a candidate twice");
    rank_[static_cast<std::size_t>(id)] = pos;
  }
  rank_[static_cast<std::size_t>(m)] = m;
}

Candidate Preference::top_of(CandidateMask set) const {
  if (set.empty()) throw ContractViolation("top_of: empty candidate set");
  for (Candidate c : ranking_)
    if (set.contains(c)) return c;
  const Candidate psi{candidate_count()};
  if (set.contains(psi)) return psi;
  throw ContractViolation("top_of: set contains unknown candidates");
}

PreferenceProfile::PreferenceProfile(CandidateSet cs, std::vector<Preference> vs)
    : candidates(std::move(cs)), voters(std::move(vs)) {
  if (voters.empty()) throw std::invalid_argument("profile needs at least one voter");
  for (const auto& p : voters)
    if (p.candidate_count() != candidates.size())
      throw std::invalid_argument("preference does not match the candidate set");
}

PreferenceProfile PreferenceProfile::from_names(const CandidateSet& cs,
                                                const std::vector<std::vector<std::string>>& rows) {
  std::vector<Preference> prefs;
  for (const auto& row : rows) {
    std::vector<Candidate> ranking;
    for (const auto& name : row) {
      auto c = cs.find(name);
      if (!c || !cs.is_valid(*c)) throw std::invalid_argument("unknown candidate '" + name + "'");
      ranking.push_back(*c);
    }
    prefs.emplace_back(std::move(ranking));
  }
  return PreferenceProfile(cs, std::move(prefs));
}

ScoreVector::ScoreVector(std::vector<int> scores) : scores_(std::move(scores)) {}

int ScoreVector::total() const { return std::accumulate(scores_.begin(), scores_.end(), 0); }

int ScoreVector::max() const {
  return scores_.empty() ? 0 : *std::max_element(scores_.begin(), scores_.end());
}

ScoreVector ScoreVector::moved(Candidate from, Candidate to) const {
  ScoreVector out = *this;
  out.move(from, to);
  return out;
}

void ScoreVector::move(Candidate from, Candidate to) {
  --scores_[static_cast<std::size_t>(from.id)];
  ++scores_[static_cast<std::size_t>(to.id)];
}

ScoreVector compute_scores(std::span<const Candidate> ballots, int candidate_count) {
  std::vector<int> s(static_cast<std::size_t>(candidate_count), 0);
  for (Candidate b : ballots) {
    if (b.id < 0 || b.id >= candidate_count) throw ContractViolation("ballot outside C+");
    ++s[static_cast<std::size_t>(b.id)];
  }
  return ScoreVector(std::move(s));
}

BallotProfile truthful_ballots(const PreferenceProfile& profile) {
  BallotProfile b;
  b.reserve(profile.voters.size());
  for (const auto& p : profile.voters) b.push_back(p.top());
  return b;
}

RuleConfig RuleConfig::majority(std::size_t n, int sigma, int tau) {
  RuleConfig r{sigma, tau, static_cast<std::size_t>(sigma) == n ? Variant::IUn : Variant::IMaj};
  r.validate(n);
  return r;
}

RuleConfig RuleConfig::unanimity(std::size_t n, int tau) {
  RuleConfig r{static_cast<int>(n), tau, Variant::IUn};
  r.validate(n);
  return r;
}

void RuleConfig::validate(std::size_t n) const {
  if (n == 0) throw std::invalid_argument("rule needs at least one voter");
  if (2 * static_cast<long long>(sigma) <= static_cast<long long>(n) || sigma > static_cast<int>(n))
    throw std::invalid_argument("sigma must satisfy n/2 < sigma <= n (n=" + std::to_string(n) +
                                ", sigma=" + std::to_string(sigma) + ")");
  if (tau < 0) throw std::invalid_argument("tau must be non-negative");
  if (variant == Variant::IUn && sigma != static_cast<int>(n))
    throw std::invalid_argument("iterative unanimity requires sigma = n");
}

std::string_view to_string(AgentKind kind) { return kind == AgentKind::Lazy ? "lazy" : "proactive"; }

std::string_view to_string(Variant v) { return v == Variant::IMaj ? "IMaj" : "IUn"; }

AgentKind parse_agent_kind(std::string_view s) {
  if (s == "lazy") return AgentKind::Lazy;
  if (s == "proactive") return AgentKind::Proactive;
  throw std::invalid_argument("unknown agent kind '" + std::string(s) + "' (expected lazy|proactive)");
}

}  // namespace cud
