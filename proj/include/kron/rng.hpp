#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

#include "kron/combinatorics.hpp"

namespace kron {

// Identifies one random stream: a user seed plus a stream index. Replicate r
// of an experiment runs on stream (seed, r), so streams never overlap and
// parallel execution order cannot change results.
struct RngSeed {
  std::uint64_t value = 0;
  std::uint64_t stream = 0;

  bool operator==(const RngSeed&) const = default;
};

// Counter-addressable generator in the Philox style: output block i of stream
// s under key c is a fixed product/xor bijection of the 128-bit input (i, s).
// Distinct streams read disjoint input sets by construction, so they can
// never overlap. The mapping is stable within a release; bit-equality across
// implementations is not promised.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  explicit CounterRng(RngSeed seed) : key_(seed.value), stream_(seed.stream) {}
  CounterRng(std::uint64_t key, std::uint64_t stream) : key_(key), stream_(stream) {}

  result_type operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    auto [first, second] = block(counter_++);
    spare_ = second;
    have_spare_ = true;
    return first;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound); bound > 0. Rejection keeps it unbiased.
  std::uint64_t uniform_below(std::uint64_t bound) {
    const std::uint64_t floor = (-bound) % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t draw = (*this)();
      if (draw >= floor) return draw % bound;
    }
  }

  uint128 uniform_below(uint128 bound) {
    if (bound <= ~std::uint64_t{0}) {
      return uniform_below(static_cast<std::uint64_t>(bound));
    }
    const uint128 floor = (-bound) % bound;  // 2^128 mod bound
    for (;;) {
      const uint128 draw = (uint128{(*this)()} << 64) | (*this)();
      if (draw >= floor) return draw % bound;
    }
  }

 private:
  std::pair<std::uint64_t, std::uint64_t> block(std::uint64_t counter) const {
    std::uint64_t x0 = counter;
    std::uint64_t x1 = stream_;
    std::uint64_t key = key_;
    for (int round = 0; round < 10; ++round) {
      const uint128 product = uint128{kMultiplier} * x0;
      const auto hi = static_cast<std::uint64_t>(product >> 64);
      const auto lo = static_cast<std::uint64_t>(product);
      x0 = hi ^ key ^ x1;
      x1 = lo;
      key += kWeylStep;
    }
    return {x0, x1};
  }

  static constexpr std::uint64_t kMultiplier = 0xD2B74407B1CE6E93ull;
  static constexpr std::uint64_t kWeylStep = 0x9E3779B97F4A7C15ull;

  std::uint64_t key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::uint64_t spare_ = 0;
  bool have_spare_ = false;
};

namespace detail {

// Largest trial count handed to std::binomial_distribution directly.
inline constexpr uint128 kStdBinomialMaxTrials = uint128{1} << 62;

// Inversion sampler for Binomial(n, p) when P[0] = (1-p)^n is representable.
// n is passed as a double: for n beyond 2^53 the relative perturbation of the
// distribution is ~1e-16, the same order as the double rounding already
// inherent in p itself.
inline std::uint64_t binomial_by_inversion(double n, double p, double log_p0,
                                           CounterRng& rng) {
  const double u = rng.uniform01();
  double term = std::exp(log_p0);
  double cumulative = term;
  const double odds = p / (1.0 - p);
  std::uint64_t m = 0;
  while (u > cumulative) {
    ++m;
    term *= (n - static_cast<double>(m) + 1.0) / static_cast<double>(m) * odds;
    cumulative += term;
    if (term <= 0.0 || static_cast<double>(m) >= n) break;
  }
  return m;
}

}  // namespace detail

// Binomial(trials, p) for trial counts up to 2^127. Counts that fit the
// standard distribution go straight to it; huge counts use inversion when the
// zero term is representable and otherwise split in half recursively (the sum
// of independent halves has exactly the right law).
inline uint128 sample_binomial(uint128 trials, double p, CounterRng& rng) {
  if (trials == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return trials;
  if (trials <= detail::kStdBinomialMaxTrials) {
    std::binomial_distribution<long long> dist(static_cast<long long>(trials), p);
    return static_cast<uint128>(dist(rng));
  }
  const double n = to_double(trials);
  const double log_p0 = n * std::log1p(-p);
  if (log_p0 > -700.0) {
    return detail::binomial_by_inversion(n, p, log_p0, rng);
  }
  const uint128 half = trials / 2;
  return sample_binomial(half, p, rng) + sample_binomial(trials - half, p, rng);
}

}  // namespace kron
