#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "cud/types.hpp"

namespace cud {

/// Parse failure with the 1-based line it was detected on.
class SocParseError : public std::runtime_error {
 public:
  SocParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Strict complete orders with multiplicities, as read from a PrefLib SOC file.
struct SocData {
  CandidateSet candidates;
  std::vector<Preference> orders;
  std::vector<std::uint64_t> multiplicities;

  std::uint64_t voter_count() const;
  /// Expands multiplicities into one preference per voter.
  PreferenceProfile expand() const;
};

/// Reads either PrefLib layout:
///   current:  "# NUMBER ALTERNATIVES: m", "# ALTERNATIVE NAME i: ...", then "count: c1,c2,..."
///   legacy:   "m", m lines "i,name", "voters,sum,unique", then "count,c1,c2,..."
/// Alternatives are 1-based in the file. The default alternative is appended implicitly.
SocData parse_soc(std::istream& in);
SocData parse_soc_file(const std::string& path);

/// Writes the current PrefLib layout; identical orders are merged.
void write_soc(std::ostream& out, const PreferenceProfile& profile, const std::string& title);

}  // namespace cud
