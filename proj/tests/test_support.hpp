#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "cud/rng.hpp"
#include "cud/types.hpp"

namespace cud::testing {

inline Preference random_order(int m, Rng& rng) {
  std::vector<Candidate> r;
  for (int i = 0; i < m; ++i) r.push_back(Candidate{i});
  for (int i = m - 1; i > 0; --i) std::swap(r[static_cast<std::size_t>(i)], r[rng.uniform_index(static_cast<std::uint64_t>(i) + 1)]);
  return Preference(std::move(r));
}

inline PreferenceProfile random_profile(std::size_t n, int m, Rng& rng) {
  std::vector<Preference> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(random_order(m, rng));
  return PreferenceProfile(CandidateSet::lettered(m), std::move(v));
}

/// Random rule with n/2 < sigma <= n and 0 <= tau <= max_tau.
inline RuleConfig random_rule(std::size_t n, int max_tau, Rng& rng) {
  const int lo = static_cast<int>(n) / 2 + 1;
  const int sigma = lo + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(static_cast<int>(n) - lo + 1)));
  const int tau = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(max_tau) + 1));
  return RuleConfig::majority(n, sigma, tau);
}

inline PreferenceProfile example1_profile() {
  return PreferenceProfile::from_names(CandidateSet::lettered(3), {{"a", "b", "c"}, {"b", "c", "a"}, {"c", "a", "b"}});
}

inline PreferenceProfile example2_profile() {
  return PreferenceProfile::from_names(CandidateSet::lettered(4), {{"a", "b", "c", "d"},
                                                                   {"a", "c", "b", "d"},
                                                                   {"b", "c", "a", "d"},
                                                                   {"b", "a", "c", "d"},
                                                                   {"c", "b", "d", "a"}});
}

}  // namespace cud::testing
