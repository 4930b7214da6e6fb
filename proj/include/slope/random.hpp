#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace slope {

/// SplitMix64 step (Steele, Lea, Flood 2014). Used to expand a 64-bit seed.
std::uint64_t splitmix64(std::uint64_t& state);

/// xoshiro256** 1.0 (Blackman & Vigna), seeded by four SplitMix64 draws.
///
/// Every draw is specified bit-for-bit so that permutations, row selections
/// and noise are reproducible by any implementation of the same generator.
/// std:: distributions are deliberately not used: their output is
/// implementation-defined.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next(); }
  result_type next();

  /// Uniform integer in [0, bound) by rejection on the biased low range.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform();

  /// Standard normal via Box-Muller; both values of each pair are used.
  double normal();

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Fisher-Yates permutation of 0..n-1 (descending swap loop).
std::vector<std::uint32_t> random_permutation(std::size_t n, std::uint64_t seed);

}  // namespace slope
