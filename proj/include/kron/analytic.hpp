#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "kron/combinatorics.hpp"
#include "kron/errors.hpp"
#include "kron/model.hpp"

namespace kron {

enum class Feature { isolated_vertices, edges, self_loops, two_walks, triangles };

// exact: the expectation itself. upper_bound: dominates the expectation.
// closed_form: a published-style closed form that is neither (the degree-sum
// edge count folds loops in at half weight).
enum class PredictionKind { exact, upper_bound, closed_form };

inline const char* to_string(Feature f) {
  switch (f) {
    case Feature::isolated_vertices: return "isolated_vertices";
    case Feature::edges: return "edges";
    case Feature::self_loops: return "self_loops";
    case Feature::two_walks: return "two_walks";
    case Feature::triangles: return "triangles";
  }
  return "?";
}

inline const char* to_string(PredictionKind k) {
  switch (k) {
    case PredictionKind::exact: return "exact";
    case PredictionKind::upper_bound: return "upper_bound";
    case PredictionKind::closed_form: return "closed_form";
  }
  return "?";
}

inline PredictionKind parse_prediction_kind(std::string_view name) {
  if (name == "exact") return PredictionKind::exact;
  if (name == "upper_bound") return PredictionKind::upper_bound;
  if (name == "closed_form") return PredictionKind::closed_form;
  throw parse_error("unknown prediction kind: " + std::string(name));
}

struct FeaturePrediction {
  Feature feature;
  PredictionKind kind;
  double value = 0.0;
  std::string formula_id;
  // Set when the true value is positive but smaller than the smallest
  // representable double, so 0 is reported.
  bool underflowed = false;

  bool operator==(const FeaturePrediction&) const = default;
};

// Threshold classification of an initiator matrix; k plays no role.
struct RegimeReport {
  bool no_isolated_whp = false;  // beta + gamma > ln 2
  bool no_edges_whp = false;     // alpha + 2 beta + gamma < 1
  bool no_loops_whp = false;     // alpha + gamma < 1
  double edge_threshold_margin = 0.0;  // alpha + 2 beta + gamma - 1
  double loop_threshold_margin = 0.0;  // alpha + gamma - 1

  bool operator==(const RegimeReport&) const = default;
};

namespace detail {

inline double exp_or_flag(double log_value, bool& underflowed) {
  if (log_value == -std::numeric_limits<double>::infinity()) return 0.0;
  const double v = std::exp(log_value);
  if (v == 0.0) underflowed = true;
  return v;
}

inline void require_weight(int weight, int k) {
  if (weight < 0 || weight > k) {
    throw weight_out_of_range("vertex weight must be in [0, k]");
  }
}

}  // namespace detail

// Expected degree of a vertex of the given weight: one Bernoulli partner per
// vertex (the self pair included once), summed in closed form.
inline double expected_degree(int weight, const ModelParams& params) {
  detail::require_weight(weight, params.k());
  const Initiator& t = params.theta();
  return std::pow(t.alpha() + t.beta(), weight) *
         std::pow(t.beta() + t.gamma(), params.k() - weight);
}

// Sum of expected degrees over all vertices: (alpha + 2 beta + gamma)^k.
// Also the sum of edge_probability over all ordered pairs.
inline double expected_total_degree(const ModelParams& params) {
  return std::pow(params.theta().edge_mass(), params.k());
}

// Half the expected total degree. Counts each distinct pair once and each
// self loop at weight 1/2, so it is not the expected number of either.
inline FeaturePrediction expected_edges_degree_sum(const ModelParams& params) {
  FeaturePrediction p{Feature::edges, PredictionKind::closed_form, 0.0,
                      "edges_degree_sum"};
  p.value = 0.5 * expected_total_degree(params);
  if (p.value == 0.0 && params.theta().edge_mass() > 0.0) p.underflowed = true;
  return p;
}

// Expected number of non-loop unordered edges:
// ((alpha + 2 beta + gamma)^k - (alpha + gamma)^k) / 2.
inline FeaturePrediction expected_edges_exact(const ModelParams& params) {
  FeaturePrediction p{Feature::edges, PredictionKind::exact, 0.0, "edges_exact"};
  const Initiator& t = params.theta();
  const double total = std::pow(t.edge_mass(), params.k());
  const double diagonal = std::pow(t.loop_mass(), params.k());
  p.value = 0.5 * (total - diagonal);
  if (p.value < 0.0) p.value = 0.0;  // rounding guard; diagonal <= total
  if (p.value == 0.0 && t.edge_mass() > t.loop_mass()) p.underflowed = true;
  return p;
}

// Expected number of self loops: (alpha + gamma)^k.
inline FeaturePrediction expected_self_loops(const ModelParams& params) {
  FeaturePrediction p{Feature::self_loops, PredictionKind::exact, 0.0, "self_loops"};
  const double mass = params.theta().loop_mass();
  p.value = std::pow(mass, params.k());
  if (p.value == 0.0 && mass > 0.0) p.underflowed = true;
  return p;
}

// The isolated-vertex count admits two printed bound variants that are NOT
// equal in general; both are exposed rather than silently picking one.
//   exp_degree: 2^k * exp(-(beta+gamma)^k), what the union-bound chain yields
//               ((beta+gamma)^k is the minimum expected degree).
//   geometric:  (2 * e^{-(beta+gamma)})^k = 2^k * exp(-k (beta+gamma)), the
//               per-level form behind the ln 2 regime threshold.
enum class IsolatedBoundForm { exp_degree, geometric };

inline FeaturePrediction isolated_upper_bound(const ModelParams& params,
                                              IsolatedBoundForm form) {
  const double bg = params.theta().beta() + params.theta().gamma();
  const int k = params.k();
  FeaturePrediction p{Feature::isolated_vertices, PredictionKind::upper_bound, 0.0,
                      form == IsolatedBoundForm::exp_degree
                          ? "isolated_bound_exp_degree"
                          : "isolated_bound_geometric"};
  const double log_value = form == IsolatedBoundForm::exp_degree
                               ? k * std::numbers::ln2 - std::pow(bg, k)
                               : k * (std::numbers::ln2 - bg);
  p.value = detail::exp_or_flag(log_value, p.underflowed);
  return p;
}

// Exact expected number of isolated vertices (no incident non-loop edge and
// no self loop; the partner classes of a vertex include the vertex itself, so
// its loop is part of the product). For each weight l the partners split into
// classes by their agreement profile with the fixed vertex; the no-edge
// probability is the product over classes of (1-p)^count, accumulated with
// log1p. O(k^3) overall.
inline FeaturePrediction expected_isolated_exact(const ModelParams& params) {
  const int k = params.k();
  const Initiator& t = params.theta();
  FeaturePrediction out{Feature::isolated_vertices, PredictionKind::exact, 0.0,
                        "isolated_exact"};
  double total = 0.0;
  bool any_possible = false;
  for (int l = 0; l <= k; ++l) {
    double log_prod = 0.0;
    bool impossible = false;
    for (int i = 0; i <= l && !impossible; ++i) {
      for (int j = 0; j <= k - l; ++j) {
        // Partner class: i positions (1,1), (l-i)+j mixed, the rest (0,0).
        const double p =
            signature_probability(PairSignature{i, (l - i) + j, k - l - j}, t);
        if (p >= 1.0) {
          impossible = true;  // some partner is connected almost surely
          break;
        }
        const uint128 count = static_cast<uint128>(choose(l, i)) * choose(k - l, j);
        log_prod += to_double(count) * std::log1p(-p);
      }
    }
    if (impossible) continue;
    any_possible = true;
    bool ignored = false;
    total += static_cast<double>(choose(k, l)) * detail::exp_or_flag(log_prod, ignored);
  }
  out.value = total;
  if (total == 0.0 && any_possible) out.underflowed = true;
  return out;
}

namespace detail {

// Shared closed-form pieces of the two-walk count for beta + gamma > 0.
struct TwoWalkTerms {
  double log_bg;    // log(beta + gamma)
  double log_from_one;  // log(alpha (alpha+beta)/(beta+gamma) + beta)
  double log_from_zero; // log(beta (alpha+beta)/(beta+gamma) + gamma)
  double from_one;
  double from_zero;
};

inline TwoWalkTerms two_walk_terms(const Initiator& t) {
  const double bg = t.beta() + t.gamma();
  const double ratio = (t.alpha() + t.beta()) / bg;
  TwoWalkTerms terms{};
  terms.from_one = t.alpha() * ratio + t.beta();
  terms.from_zero = t.beta() * ratio + t.gamma();
  terms.log_bg = std::log(bg);
  terms.log_from_one = std::log(terms.from_one);
  terms.log_from_zero = std::log(terms.from_zero);
  return terms;
}

}  // namespace detail

// Expected number of ordered two-step walks (v1, v2, v3) starting at a fixed
// vertex v1 of the given weight. Degenerate walks (repeated vertices, loops)
// are counted, exactly as the closed-form double sum does. At beta+gamma = 0
// only the all-ones self walk survives: alpha^{2k} when weight = k, else 0.
inline double expected_two_walks_from(int weight, const ModelParams& params) {
  detail::require_weight(weight, params.k());
  const Initiator& t = params.theta();
  const int k = params.k();
  if (t.beta() + t.gamma() == 0.0) {
    return weight == k ? std::pow(t.alpha(), 2 * k) : 0.0;
  }
  const auto terms = detail::two_walk_terms(t);
  const double log_value = k * terms.log_bg + weight * terms.log_from_one +
                           (k - weight) * terms.log_from_zero;
  bool ignored = false;
  return detail::exp_or_flag(log_value, ignored);
}

// Expected two-walk count over all start vertices: (beta+gamma)^k (A+B)^k in
// the closed-form factoring, which collapses to ((alpha+beta)^2 +
// (beta+gamma)^2)^k. The latter is the removable-singularity value used at
// beta + gamma = 0 (where it equals alpha^{2k}).
inline double two_walk_total(const ModelParams& params) {
  const Initiator& t = params.theta();
  const int k = params.k();
  if (t.beta() + t.gamma() == 0.0) {
    return std::pow(t.alpha(), 2 * k);
  }
  const auto terms = detail::two_walk_terms(t);
  const double log_value = k * (terms.log_bg + std::log(terms.from_one + terms.from_zero));
  bool ignored = false;
  return detail::exp_or_flag(log_value, ignored);
}

inline FeaturePrediction two_walk_prediction(const ModelParams& params) {
  FeaturePrediction p{Feature::two_walks, PredictionKind::exact, 0.0, "two_walks"};
  p.value = two_walk_total(params);
  if (p.value == 0.0 && params.theta().alpha() > 0.0) p.underflowed = true;
  return p;
}

// Upper bound on the expected triangle count: the two-walk total times
// alpha^k (the maximum closing-edge probability), exactly as printed - no
// half factor, degenerate walks included. alpha^{3k} at beta + gamma = 0.
inline FeaturePrediction triangle_upper_bound(const ModelParams& params) {
  const Initiator& t = params.theta();
  const int k = params.k();
  FeaturePrediction p{Feature::triangles, PredictionKind::upper_bound, 0.0,
                      "triangle_bound"};
  if (t.beta() + t.gamma() == 0.0) {
    p.value = std::pow(t.alpha(), 3 * k);
    if (p.value == 0.0 && t.alpha() > 0.0) p.underflowed = true;
    return p;
  }
  const auto terms = detail::two_walk_terms(t);
  const double log_value =
      k * (terms.log_bg + std::log(terms.from_one + terms.from_zero) + std::log(t.alpha()));
  p.value = detail::exp_or_flag(log_value, p.underflowed);
  return p;
}

inline constexpr int kTriangleOracleMaxK = 7;

// Exact expected triangle count (distinct vertices, loops excluded), by
// enumerating all unordered triples: sum of p(u,v) p(v,w) p(u,w). O(8^k), so
// gated by an explicit cap.
inline FeaturePrediction expected_triangles_exact(const ModelParams& params,
                                                  int max_k = kTriangleOracleMaxK) {
  const int k = params.k();
  if (k > max_k) {
    throw oracle_too_large("triangle enumeration capped at k = " + std::to_string(max_k));
  }
  const Initiator& t = params.theta();
  const std::uint64_t n = params.vertex_count();

  // All pair probabilities depend only on the agreement profile.
  std::vector<double> by_profile((k + 1) * (k + 1));
  for (int ones = 0; ones <= k; ++ones) {
    for (int mixed = 0; ones + mixed <= k; ++mixed) {
      by_profile[ones * (k + 1) + mixed] =
          signature_probability(PairSignature{ones, mixed, k - ones - mixed}, t);
    }
  }
  std::vector<double> pair(n * n, 0.0);
  for (std::uint64_t u = 0; u < n; ++u) {
    for (std::uint64_t v = u + 1; v < n; ++v) {
      const int ones = std::popcount(u & v);
      const int mixed = std::popcount(u ^ v);
      pair[u * n + v] = by_profile[ones * (k + 1) + mixed];
    }
  }
  double total = 0.0;
  for (std::uint64_t u = 0; u < n; ++u) {
    for (std::uint64_t v = u + 1; v < n; ++v) {
      const double puv = pair[u * n + v];
      if (puv == 0.0) continue;
      for (std::uint64_t w = v + 1; w < n; ++w) {
        total += puv * pair[v * n + w] * pair[u * n + w];
      }
    }
  }
  return FeaturePrediction{Feature::triangles, PredictionKind::exact, total,
                           "triangles_exact"};
}

// Exact P[no edge anywhere], evaluated per signature class: all unordered
// distinct pairs in a class share one probability, so the product is
// (1-p)^(class size) accumulated in log space. Optionally folds in the
// per-vertex loop indicators as well.
inline double prob_no_edges_exact(const ModelParams& params, bool include_loops) {
  const int k = params.k();
  const Initiator& t = params.theta();
  double log_total = 0.0;
  for (int ones = 0; ones <= k; ++ones) {
    for (int zeros = 0; ones + zeros <= k; ++zeros) {
      const int mixed = k - ones - zeros;
      if (mixed == 0) continue;  // diagonal: handled as loops below
      const PairSignature sig{ones, mixed, zeros};
      const double p = signature_probability(sig, t);
      if (p >= 1.0) return 0.0;
      if (p == 0.0) continue;
      const uint128 unordered = signature_count(sig, k) >> 1;
      log_total += to_double(unordered) * std::log1p(-p);
    }
  }
  if (include_loops) {
    for (int l = 0; l <= k; ++l) {
      const double p = signature_probability(PairSignature{l, 0, k - l}, t);
      if (p >= 1.0) return 0.0;
      if (p == 0.0) continue;
      log_total += static_cast<double>(choose(k, l)) * std::log1p(-p);
    }
  }
  return std::exp(log_total);
}

// Exact P[no self loop anywhere]: product over weight classes of
// (1 - alpha^l gamma^{k-l})^C(k,l), in log space.
inline double prob_no_loops_exact(const ModelParams& params) {
  const int k = params.k();
  const Initiator& t = params.theta();
  double log_total = 0.0;
  for (int l = 0; l <= k; ++l) {
    const double p = signature_probability(PairSignature{l, 0, k - l}, t);
    if (p >= 1.0) return 0.0;
    if (p == 0.0) continue;
    log_total += static_cast<double>(choose(k, l)) * std::log1p(-p);
  }
  return std::exp(log_total);
}

// Sufficient-condition flags and threshold margins. Pure classification of
// the initiator; no k dependence.
inline RegimeReport regime_report(const Initiator& theta) {
  RegimeReport r{};
  r.no_isolated_whp = theta.beta() + theta.gamma() > std::numbers::ln2;
  r.no_edges_whp = theta.edge_mass() < 1.0;
  r.no_loops_whp = theta.loop_mass() < 1.0;
  r.edge_threshold_margin = theta.edge_mass() - 1.0;
  r.loop_threshold_margin = theta.loop_mass() - 1.0;
  return r;
}

// Every closed-form prediction for (theta, k), in a fixed order. The exact
// triangle count joins only when k is within the enumeration cap.
inline std::vector<FeaturePrediction> all_predictions(
    const ModelParams& params, int triangle_oracle_max_k = kTriangleOracleMaxK) {
  std::vector<FeaturePrediction> out;
  out.push_back(expected_isolated_exact(params));
  out.push_back(isolated_upper_bound(params, IsolatedBoundForm::exp_degree));
  out.push_back(isolated_upper_bound(params, IsolatedBoundForm::geometric));
  out.push_back(expected_edges_exact(params));
  out.push_back(expected_edges_degree_sum(params));
  out.push_back(expected_self_loops(params));
  out.push_back(two_walk_prediction(params));
  out.push_back(triangle_upper_bound(params));
  if (params.k() <= triangle_oracle_max_k) {
    out.push_back(expected_triangles_exact(params, triangle_oracle_max_k));
  }
  return out;
}

}  // namespace kron
