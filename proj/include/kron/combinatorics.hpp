#pragma once

#include <array>
#include <cassert>
#include <cstdint>
#include <span>
#include <vector>

#include "kron/errors.hpp"

namespace kron {

// 128-bit counts. Every pair count handled by this library is < 4^63 < 2^127,
// so arithmetic on uint128 is exact everywhere.
using uint128 = unsigned __int128;

inline double to_double(uint128 v) {
  // Split so the conversion stays well inside double's exponent range.
  const auto hi = static_cast<std::uint64_t>(v >> 64);
  const auto lo = static_cast<std::uint64_t>(v);
  return static_cast<double>(hi) * 18446744073709551616.0 + static_cast<double>(lo);
}

namespace detail {

inline constexpr int kMaxChooseN = 64;

// Pascal's triangle in 64-bit words; C(n, r) for n <= 63 fits uint64_t.
inline const std::array<std::array<std::uint64_t, kMaxChooseN + 1>, kMaxChooseN + 1>&
choose_table() {
  static const auto table = [] {
    std::array<std::array<std::uint64_t, kMaxChooseN + 1>, kMaxChooseN + 1> t{};
    for (int n = 0; n <= kMaxChooseN; ++n) {
      t[n][0] = 1;
      for (int r = 1; r <= n; ++r) {
        t[n][r] = t[n - 1][r - 1] + (r <= n - 1 ? t[n - 1][r] : 0);
      }
    }
    return t;
  }();
  return table;
}

}  // namespace detail

// C(n, r), exact for 0 <= n <= 63.
inline std::uint64_t choose(int n, int r) {
  assert(n >= 0 && n <= detail::kMaxChooseN);
  if (r < 0 || r > n) return 0;
  return detail::choose_table()[n][r];
}

// Number of ways to split k positions into groups of sizes a, b, and k-a-b.
// Exact: the result is at most 3^k < 2^101 for k <= 63.
inline uint128 multinomial(int k, int a, int b) {
  assert(a >= 0 && b >= 0 && a + b <= k);
  return static_cast<uint128>(choose(k, a)) * choose(k - a, b);
}

// Lexicographic unranking of r-subsets of {0, .., n-1}: rank 0 maps to
// {0, .., r-1}, rank C(n,r)-1 to {n-r, .., n-1}. Elements returned ascending.
inline void unrank_subset(std::uint64_t rank, int n, int r, std::vector<int>& out) {
  assert(rank < choose(n, r));
  out.clear();
  int element = 0;
  for (int slot = 0; slot < r; ++slot) {
    for (;;) {
      const std::uint64_t with_element = choose(n - 1 - element, r - 1 - slot);
      if (rank < with_element) {
        out.push_back(element);
        ++element;
        break;
      }
      rank -= with_element;
      ++element;
    }
  }
}

// Deterministic pairwise (divide and conquer) summation; the result depends
// only on element order, never on chunking or thread schedule upstream.
inline double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace kron
