#include "cud/rng.hpp"

#include <limits>
#include <stdexcept>

namespace cud {

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: empty range");
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  // Largest multiple of n that fits; draws at or above it are rejected.
  const std::uint64_t limit = kMax - (kMax % n + 1) % n;
  std::uint64_t x = engine_();
  while (x > limit) x = engine_();
  return x % n;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_string(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t k : keys) h = splitmix64(h ^ splitmix64(k));
  return h;
}

}  // namespace cud
