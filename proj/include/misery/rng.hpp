#pragma once

#include <cstdint>

namespace misery {

/// SplitMix64 generator. Every random draw in the engine goes through this
/// class so that a seed means the same thing in any implementation.
///
/// Bit-exact definition (all arithmetic mod 2^64):
///
///     state += 0x9E3779B97F4A7C15
///     z = state
///     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///     return z ^ (z >> 31)
///
/// Derived quantities:
///   - uniform_below(n): draw r until r >= (2^64 - n) mod n, return r mod n
///   - uniform01():      (next() >> 11) * 2^-53, in [0, 1)
///   - normal():         Box-Muller cosine branch with
///                       u1 = ((next() >> 11) + 1) * 2^-53, u2 = uniform01(),
///                       z = sqrt(-2 ln u1) * cos(2 pi u2); no value is cached
///   - derive(seed, salt): Rng(mix64(seed ^ mix64(salt + 0x9E3779B97F4A7C15)))
///                       where mix64 is the output finalizer above
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static Rng derive(std::uint64_t seed, std::uint64_t salt);

  std::uint64_t next();
  std::uint64_t uniform_below(std::uint64_t n);
  double uniform01();
  double normal();

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

std::uint64_t mix64(std::uint64_t z);

}  // namespace misery
