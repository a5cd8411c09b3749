#include "misery/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace misery {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;
}  // namespace

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Rng Rng::derive(std::uint64_t seed, std::uint64_t salt) {
  return Rng(mix64(seed ^ mix64(salt + kGolden)));
}

std::uint64_t Rng::next() {
  state_ += kGolden;
  return mix64(state_);
}

std::uint64_t Rng::uniform_below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below: n must be positive");
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % n;
  }
}

double Rng::uniform01() { return static_cast<double>(next() >> 11) * kTwoPow53Inv; }

double Rng::normal() {
  const double u1 = static_cast<double>((next() >> 11) + 1) * kTwoPow53Inv;
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace misery
