#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cud {

/// Raised when a caller breaks an operation's precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Index of an alternative. Valid candidates are 0..m-1; the default
/// alternative is always m.
struct Candidate {
  int id = 0;
  friend constexpr auto operator<=>(Candidate, Candidate) = default;
};

using VoterId = std::size_t;

/// Bit set over C = C+ plus the default; supports up to 63 valid candidates.
class CandidateMask {
 public:
  constexpr CandidateMask() = default;
  constexpr explicit CandidateMask(std::uint64_t bits) : bits_(bits) {}

  static constexpr CandidateMask of(Candidate c) { return CandidateMask{std::uint64_t{1} << c.id}; }

  constexpr bool contains(Candidate c) const { return (bits_ >> c.id) & 1U; }
  constexpr void insert(Candidate c) { bits_ |= std::uint64_t{1} << c.id; }
  constexpr void erase(Candidate c) { bits_ &= ~(std::uint64_t{1} << c.id); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr std::uint64_t bits() const { return bits_; }

  /// The only member, if there is exactly one.
  constexpr std::optional<Candidate> single() const {
    if (size() != 1) return std::nullopt;
    return Candidate{std::countr_zero(bits_)};
  }

  std::vector<Candidate> members() const {
    std::vector<Candidate> out;
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(Candidate{std::countr_zero(b)});
    return out;
  }

  constexpr CandidateMask operator|(CandidateMask o) const { return CandidateMask{bits_ | o.bits_}; }
  constexpr CandidateMask operator&(CandidateMask o) const { return CandidateMask{bits_ & o.bits_}; }
  constexpr bool is_subset_of(CandidateMask o) const { return (bits_ & ~o.bits_) == 0; }
  friend constexpr bool operator==(CandidateMask, CandidateMask) = default;

 private:
  std::uint64_t bits_ = 0;
};

/// The valid alternatives C+ plus the distinguished default.
class CandidateSet {
 public:
  static constexpr int kMaxCandidates = 63;

  CandidateSet() = default;
  explicit CandidateSet(std::vector<std::string> names, std::string default_name = "psi");

  /// Candidates named a, b, c, ... (or c1..cm past 26).
  static CandidateSet lettered(int m);

  int size() const { return static_cast<int>(names_.size()); }
  Candidate default_candidate() const { return Candidate{size()}; }
  bool is_valid(Candidate c) const { return c.id >= 0 && c.id < size(); }
  bool is_default(Candidate c) const { return c.id == size(); }
  CandidateMask all_valid() const { return CandidateMask{(std::uint64_t{1} << size()) - 1}; }

  const std::string& name(Candidate c) const;
  std::optional<Candidate> find(std::string_view name) const;
  const std::vector<std::string>& names() const { return names_; }

  friend bool operator==(const CandidateSet&, const CandidateSet&) = default;

 private:
  std::vector<std::string> names_;
  std::string default_name_ = "psi";
};

/// A voter's truthful strict order. The default alternative is implicitly last.
class Preference {
 public:
  Preference() = default;
  /// `ranking` lists every valid candidate exactly once, best first.
  explicit Preference(std::vector<Candidate> ranking);

  int candidate_count() const { return static_cast<int>(ranking_.size()); }
  const std::vector<Candidate>& ranking() const { return ranking_; }

  /// 0 for the favourite; the default alternative ranks m.
  int rank(Candidate c) const { return rank_[static_cast<std::size_t>(c.id)]; }
  bool prefers(Candidate a, Candidate b) const { return rank(a) < rank(b); }
  Candidate top() const { return ranking_.front(); }

  /// Best member of a non-empty set.
  Candidate top_of(CandidateMask set) const;

  friend bool operator==(const Preference& a, const Preference& b) { return a.ranking_ == b.ranking_; }

 private:
  std::vector<Candidate> ranking_;
  std::vector<int> rank_;
};

struct PreferenceProfile {
  CandidateSet candidates;
  std::vector<Preference> voters;

  PreferenceProfile() = default;
  PreferenceProfile(CandidateSet cs, std::vector<Preference> vs);

  std::size_t voter_count() const { return voters.size(); }
  int candidate_count() const { return candidates.size(); }

  /// Builds a profile from rows of candidate names, best first.
  static PreferenceProfile from_names(const CandidateSet& cs,
                                      const std::vector<std::vector<std::string>>& rows);
};

using BallotProfile = std::vector<Candidate>;

/// Per-candidate tallies over C+.
class ScoreVector {
 public:
  ScoreVector() = default;
  explicit ScoreVector(std::vector<int> scores);

  int operator[](Candidate c) const { return scores_[static_cast<std::size_t>(c.id)]; }
  int size() const { return static_cast<int>(scores_.size()); }
  int total() const;
  int max() const;
  const std::vector<int>& values() const { return scores_; }

  /// s - from + to.
  ScoreVector moved(Candidate from, Candidate to) const;
  void move(Candidate from, Candidate to);

  friend bool operator==(const ScoreVector&, const ScoreVector&) = default;

 private:
  std::vector<int> scores_;
};

ScoreVector compute_scores(std::span<const Candidate> ballots, int candidate_count);

/// Truthful ballot profile: every voter ballots her favourite.
BallotProfile truthful_ballots(const PreferenceProfile& profile);

enum class Variant { IMaj, IUn };

struct RuleConfig {
  int sigma = 1;
  int tau = 0;
  Variant variant = Variant::IMaj;

  static RuleConfig majority(std::size_t n, int sigma, int tau);
  static RuleConfig unanimity(std::size_t n, int tau);

  /// Throws std::invalid_argument unless n/2 < sigma <= n and tau >= 0.
  void validate(std::size_t n) const;

  friend bool operator==(const RuleConfig&, const RuleConfig&) = default;
};

enum class AgentKind { Lazy, Proactive };

std::string_view to_string(AgentKind kind);
std::string_view to_string(Variant v);
AgentKind parse_agent_kind(std::string_view s);

}  // namespace cud
