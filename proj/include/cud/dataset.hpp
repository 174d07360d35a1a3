#pragma once

#include <memory>
#include <string>
#include <variant>

#include "cud/rng.hpp"
#include "cud/soc.hpp"
#include "cud/types.hpp"

namespace cud {

struct ImpartialCulture {
  int m = 5;
};

struct SocFile {
  std::string path;
};

struct DatasetSpec {
  std::variant<ImpartialCulture, SocFile> source;
  std::string name;

  static DatasetSpec uniform(int m);  // named "Uniform<m>"
  static DatasetSpec soc(std::string path, std::string name);
};

/// A loaded source that can be sampled from.
class Dataset {
 public:
  /// Loads SOC files eagerly; throws SocParseError or std::runtime_error.
  static Dataset load(const DatasetSpec& spec);
  static Dataset from_soc(SocData data, std::string name);

  const std::string& name() const { return name_; }
  int candidate_count() const { return candidates_.size(); }
  const CandidateSet& candidates() const { return candidates_; }

  /// n orders drawn i.i.d. with replacement. Impartial culture draws a uniform
  /// permutation per voter; SOC sources draw voters weighted by multiplicity.
  PreferenceProfile sample(std::size_t n, Rng& rng) const;

 private:
  std::string name_;
  CandidateSet candidates_;
  std::shared_ptr<const SocData> soc_;            // null for impartial culture
  std::vector<std::uint64_t> cumulative_;         // prefix sums of multiplicities
};

PreferenceProfile sample_profile(const Dataset& dataset, std::size_t n, Rng& rng);

}  // namespace cud
