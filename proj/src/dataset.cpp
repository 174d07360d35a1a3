#include "cud/dataset.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace cud {

DatasetSpec DatasetSpec::uniform(int m) { return DatasetSpec{ImpartialCulture{m}, "Uniform" + std::to_string(m)}; }

DatasetSpec DatasetSpec::soc(std::string path, std::string name) {
  return DatasetSpec{SocFile{std::move(path)}, std::move(name)};
}

Dataset Dataset::load(const DatasetSpec& spec) {
  if (const auto* ic = std::get_if<ImpartialCulture>(&spec.source)) {
    if (ic->m < 2) throw std::invalid_argument("impartial culture needs at least 2 candidates");
    Dataset d;
    d.name_ = spec.name;
    d.candidates_ = CandidateSet::lettered(ic->m);
    return d;
  }
  return from_soc(parse_soc_file(std::get<SocFile>(spec.source).path), spec.name);
}

Dataset Dataset::from_soc(SocData data, std::string name) {
  Dataset d;
  d.name_ = std::move(name);
  d.candidates_ = data.candidates;
  d.cumulative_.resize(data.multiplicities.size());
  std::partial_sum(data.multiplicities.begin(), data.multiplicities.end(), d.cumulative_.begin());
  d.soc_ = std::make_shared<const SocData>(std::move(data));
  return d;
}

PreferenceProfile Dataset::sample(std::size_t n, Rng& rng) const {
  if (n == 0) throw std::invalid_argument("sample needs at least one voter");
  std::vector<Preference> voters;
  voters.reserve(n);
  const int m = candidate_count();
  for (std::size_t v = 0; v < n; ++v) {
    if (soc_) {
      const std::uint64_t r = rng.uniform_index(cumulative_.back());
      const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
      voters.push_back(soc_->orders[static_cast<std::size_t>(it - cumulative_.begin())]);
    } else {
      std::vector<Candidate> order(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = Candidate{i};
      for (std::size_t i = order.size() - 1; i > 0; --i)
        std::swap(order[i], order[rng.uniform_index(i + 1)]);
      voters.emplace_back(std::move(order));
    }
  }
  return PreferenceProfile(candidates_, std::move(voters));
}

PreferenceProfile sample_profile(const Dataset& dataset, std::size_t n, Rng& rng) { return dataset.sample(n, rng); }

}  // namespace cud
