#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kron/combinatorics.hpp"
#include "kron/errors.hpp"
#include "kron/model.hpp"
#include "kron/rng.hpp"

namespace kron {

// One random realization of the model: unordered non-loop edges with u < v,
// loop vertices listed separately, both sorted ascending.
struct GraphSample {
  ModelParams params;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> edges;
  std::vector<std::uint64_t> loops;
  RngSeed seed;
};

struct FeatureCounts {
  std::uint64_t isolated = 0;
  std::uint64_t edges = 0;  // non-loop
  std::uint64_t loops = 0;
  std::uint64_t triangles = 0;  // distinct-vertex, loop-free
  // Non-loop degree -> number of vertices with that degree, 0 included.
  std::map<std::uint64_t, std::uint64_t> degree_histogram;

  bool operator==(const FeatureCounts&) const = default;
};

inline constexpr int kDenseSamplerMaxK = 14;
inline constexpr int kStratifiedSamplerMaxK = 40;
// Refuse samples that would not fit in memory anyway.
inline constexpr std::uint64_t kMaxSampleEdges = std::uint64_t{1} << 28;

namespace detail {

// alpha^ones * beta^mixed * gamma^rest for every profile, indexed
// [ones * (k+1) + mixed].
inline std::vector<double> profile_probabilities(const ModelParams& params) {
  const int k = params.k();
  std::vector<double> table((k + 1) * (k + 1), 0.0);
  for (int ones = 0; ones <= k; ++ones) {
    for (int mixed = 0; ones + mixed <= k; ++mixed) {
      table[ones * (k + 1) + mixed] =
          signature_probability(PairSignature{ones, mixed, k - ones - mixed},
                                params.theta());
    }
  }
  return table;
}

}  // namespace detail

// Dense sampler: one Bernoulli trial per unordered distinct pair plus one per
// vertex for its loop, in a fixed order (loops by vertex id, then pairs in
// ascending (u, v)). O(4^k) trials, so capped. Deterministic in (params, seed).
inline GraphSample sample_dense(const ModelParams& params, RngSeed seed,
                                int max_k = kDenseSamplerMaxK) {
  if (params.k() > max_k) {
    throw sample_too_large("dense sampler capped at k = " + std::to_string(max_k));
  }
  const int k = params.k();
  const std::uint64_t n = params.vertex_count();
  const auto probability = detail::profile_probabilities(params);
  CounterRng rng(seed);
  GraphSample sample{params, {}, {}, seed};
  for (std::uint64_t v = 0; v < n; ++v) {
    const int weight = std::popcount(v);
    if (rng.uniform01() < probability[weight * (k + 1)]) {
      sample.loops.push_back(v);
    }
  }
  for (std::uint64_t u = 0; u < n; ++u) {
    for (std::uint64_t v = u + 1; v < n; ++v) {
      const int ones = std::popcount(u & v);
      const int mixed = std::popcount(u ^ v);
      if (rng.uniform01() < probability[ones * (k + 1) + mixed]) {
        sample.edges.emplace_back(u, v);
      }
    }
  }
  return sample;
}

namespace detail {

// Floyd's distinct-index sampler: m distinct values from [0, range) with
// exactly m memory and no rejection on duplicates.
inline std::set<uint128> sample_distinct_indices(uint128 range, std::uint64_t m,
                                                 CounterRng& rng) {
  std::set<uint128> chosen;
  for (uint128 j = range - m; j < range; ++j) {
    const uint128 t = rng.uniform_below(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  return chosen;
}

// Positions not present in `taken`, ascending. Both inputs ascending.
inline void complement_positions(const std::vector<int>& taken, int k,
                                 std::vector<int>& out) {
  out.clear();
  std::size_t next = 0;
  for (int pos = 0; pos < k; ++pos) {
    if (next < taken.size() && taken[next] == pos) {
      ++next;
    } else {
      out.push_back(pos);
    }
  }
}

inline std::uint64_t position_bit(int position, int k) {
  return std::uint64_t{1} << (k - 1 - position);
}

// Workspace for decoding one unordered pair of a signature class from its
// index. Pairs are indexed by (ones-subset rank, zeros-subset rank among the
// remaining positions, orientation word over the mixed positions); the first
// mixed position is pinned to the u side, which quotients out the u/v swap.
struct ClassUnranker {
  int k;
  int ones;
  int zeros;
  int mixed;
  std::uint64_t zeros_choices;  // C(k - ones, zeros)
  std::vector<int> ones_positions;
  std::vector<int> rest_positions;
  std::vector<int> zeros_in_rest;

  ClassUnranker(int k_, int ones_, int zeros_)
      : k(k_), ones(ones_), zeros(zeros_), mixed(k_ - ones_ - zeros_),
        zeros_choices(choose(k_ - ones_, zeros_)) {}

  std::pair<std::uint64_t, std::uint64_t> pair_at(uint128 index) {
    const int free_bits = mixed - 1;
    const uint128 orientation = index & ((uint128{1} << free_bits) - 1);
    const uint128 subset_rank = index >> free_bits;
    const auto zeros_rank = static_cast<std::uint64_t>(subset_rank % zeros_choices);
    const auto ones_rank = static_cast<std::uint64_t>(subset_rank / zeros_choices);

    unrank_subset(ones_rank, k, ones, ones_positions);
    complement_positions(ones_positions, k, rest_positions);
    unrank_subset(zeros_rank, k - ones, zeros, zeros_in_rest);

    std::uint64_t shared = 0;
    for (int pos : ones_positions) shared |= position_bit(pos, k);
    std::uint64_t u = shared;
    std::uint64_t v = shared;

    // rest_positions minus the zero subset are the mixed positions, ascending.
    std::size_t zeros_next = 0;
    int mixed_seen = 0;
    for (std::size_t r = 0; r < rest_positions.size(); ++r) {
      if (zeros_next < zeros_in_rest.size() &&
          zeros_in_rest[zeros_next] == static_cast<int>(r)) {
        ++zeros_next;  // position (0,0) on both sides
        continue;
      }
      const std::uint64_t bit = position_bit(rest_positions[r], k);
      if (mixed_seen == 0) {
        u |= bit;  // canonical side
      } else if ((orientation >> (mixed_seen - 1)) & 1) {
        u |= bit;
      } else {
        v |= bit;
      }
      ++mixed_seen;
    }
    return u < v ? std::make_pair(u, v) : std::make_pair(v, u);
  }
};

}  // namespace detail

// Stratified sampler: every unordered pair in a signature class shares one
// probability, so the class's edge count is Binomial(class size, p) and the
// edges themselves are a uniform distinct subset of the class, decoded by
// combinatorial unranking. Same distribution as sample_dense, but O(edges)
// work instead of O(4^k). Loops stratify by vertex weight the same way.
inline GraphSample sample_stratified(const ModelParams& params, RngSeed seed,
                                     int max_k = kStratifiedSamplerMaxK) {
  if (params.k() > max_k) {
    throw sample_too_large("stratified sampler capped at k = " + std::to_string(max_k));
  }
  const int k = params.k();
  const Initiator& theta = params.theta();
  CounterRng rng(seed);
  GraphSample sample{params, {}, {}, seed};

  // Loop classes first, by weight.
  for (int weight = 0; weight <= k; ++weight) {
    const double p = signature_probability(PairSignature{weight, 0, k - weight}, theta);
    if (p <= 0.0) continue;
    const std::uint64_t class_size = choose(k, weight);
    const auto count =
        static_cast<std::uint64_t>(sample_binomial(class_size, p, rng));
    if (count == 0) continue;
    if (sample.loops.size() + count > kMaxSampleEdges) {
      throw sample_too_large("loop sample too large to materialize");
    }
    std::vector<int> positions;
    if (count == class_size) {
      for (std::uint64_t rank = 0; rank < class_size; ++rank) {
        unrank_subset(rank, k, weight, positions);
        std::uint64_t v = 0;
        for (int pos : positions) v |= detail::position_bit(pos, k);
        sample.loops.push_back(v);
      }
    } else {
      for (uint128 index : detail::sample_distinct_indices(class_size, count, rng)) {
        unrank_subset(static_cast<std::uint64_t>(index), k, weight, positions);
        std::uint64_t v = 0;
        for (int pos : positions) v |= detail::position_bit(pos, k);
        sample.loops.push_back(v);
      }
    }
  }

  // Edge classes by (ones, zeros); mixed >= 1 means a distinct pair.
  for (int ones = 0; ones <= k; ++ones) {
    for (int zeros = 0; ones + zeros <= k; ++zeros) {
      const int mixed = k - ones - zeros;
      if (mixed == 0) continue;
      const PairSignature sig{ones, mixed, zeros};
      const double p = signature_probability(sig, theta);
      if (p <= 0.0) continue;
      const uint128 class_size = signature_count(sig, k) >> 1;
      const uint128 count = sample_binomial(class_size, p, rng);
      if (count == 0) continue;
      if (count > kMaxSampleEdges ||
          sample.edges.size() + static_cast<std::uint64_t>(count) > kMaxSampleEdges) {
        throw class_overflow("signature class produced more edges than can be materialized");
      }
      detail::ClassUnranker unranker(k, ones, zeros);
      if (count == class_size) {
        for (uint128 index = 0; index < class_size; ++index) {
          sample.edges.push_back(unranker.pair_at(index));
        }
      } else {
        for (uint128 index : detail::sample_distinct_indices(
                 class_size, static_cast<std::uint64_t>(count), rng)) {
          sample.edges.push_back(unranker.pair_at(index));
        }
      }
    }
  }

  std::sort(sample.loops.begin(), sample.loops.end());
  std::sort(sample.edges.begin(), sample.edges.end());
  return sample;
}

enum class SamplerKind { dense, stratified, auto_select };

inline const char* to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::dense: return "dense";
    case SamplerKind::stratified: return "stratified";
    case SamplerKind::auto_select: return "auto";
  }
  return "?";
}

inline SamplerKind parse_sampler_kind(std::string_view name) {
  if (name == "dense") return SamplerKind::dense;
  if (name == "stratified") return SamplerKind::stratified;
  if (name == "auto") return SamplerKind::auto_select;
  throw parse_error("unknown sampler kind: " + std::string(name));
}

// auto_select picks dense for k <= 10, stratified beyond.
inline GraphSample sample(const ModelParams& params, RngSeed seed,
                          SamplerKind kind = SamplerKind::auto_select,
                          int dense_max_k = kDenseSamplerMaxK) {
  switch (kind) {
    case SamplerKind::dense:
      return sample_dense(params, seed, dense_max_k);
    case SamplerKind::stratified:
      return sample_stratified(params, seed);
    case SamplerKind::auto_select:
      return params.k() <= 10 ? sample_dense(params, seed, dense_max_k)
                              : sample_stratified(params, seed);
  }
  throw model_error("unknown sampler kind");
}

// Triangles with three distinct vertices, loops ignored. Each edge (u, v)
// scans for common neighbors w > v, so every triangle is counted exactly once
// at its two smallest vertices.
inline std::uint64_t count_triangles(const GraphSample& sample) {
  std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> adjacency;
  adjacency.reserve(sample.edges.size() * 2);
  for (const auto& [u, v] : sample.edges) {
    adjacency[u].push_back(v);
    adjacency[v].push_back(u);
  }
  for (auto& [vertex, neighbors] : adjacency) {
    std::sort(neighbors.begin(), neighbors.end());
  }
  std::uint64_t triangles = 0;
  for (const auto& [u, v] : sample.edges) {
    const auto& nu = adjacency[u];
    const auto& nv = adjacency[v];
    auto iu = std::upper_bound(nu.begin(), nu.end(), v);
    auto iv = std::upper_bound(nv.begin(), nv.end(), v);
    while (iu != nu.end() && iv != nv.end()) {
      if (*iu == *iv) {
        ++triangles;
        ++iu;
        ++iv;
      } else if (*iu < *iv) {
        ++iu;
      } else {
        ++iv;
      }
    }
  }
  return triangles;
}

// Empirical counterparts of the analytic features. A vertex is isolated iff
// it has no incident non-loop edge and no loop.
inline FeatureCounts count_features(const GraphSample& sample) {
  FeatureCounts counts;
  counts.edges = sample.edges.size();
  counts.loops = sample.loops.size();

  std::unordered_map<std::uint64_t, std::uint64_t> degree;
  degree.reserve(sample.edges.size() * 2);
  for (const auto& [u, v] : sample.edges) {
    ++degree[u];
    ++degree[v];
  }
  std::uint64_t not_isolated = degree.size();
  for (std::uint64_t v : sample.loops) {
    if (!degree.contains(v)) ++not_isolated;
  }
  counts.isolated = sample.params.vertex_count() - not_isolated;

  const std::uint64_t degree_zero = sample.params.vertex_count() - degree.size();
  if (degree_zero > 0) counts.degree_histogram[0] = degree_zero;
  for (const auto& [vertex, d] : degree) {
    ++counts.degree_histogram[d];
  }

  counts.triangles = count_triangles(sample);
  return counts;
}

}  // namespace kron
