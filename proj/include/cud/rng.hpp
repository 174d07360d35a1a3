#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace cud {

// mt19937_64 output is fixed by the standard; the bounded draw below is our
// own so that sequences are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). Rejection sampling; n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// FNV-1a over the bytes of `s`.
std::uint64_t hash_string(std::string_view s);

/// Mixes a master seed with a sequence of keys.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys);

}  // namespace cud
