#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

#include "kron/combinatorics.hpp"
#include "kron/errors.hpp"

namespace kron {

// Symmetric 2x2 initiator matrix. entry(1,1) = alpha, entry(1,0) =
// entry(0,1) = beta, entry(0,0) = gamma, with 0 <= gamma <= beta <= alpha <= 1
// enforced at construction.
class Initiator {
 public:
  Initiator(double alpha, double beta, double gamma)
      : alpha_(alpha), beta_(beta), gamma_(gamma) {
    check(alpha, "alpha");
    check(beta, "beta");
    check(gamma, "gamma");
    if (gamma > beta) {
      throw ordering_violation("initiator ordering violated: gamma > beta");
    }
    if (beta > alpha) {
      throw ordering_violation("initiator ordering violated: beta > alpha");
    }
  }

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double gamma() const { return gamma_; }

  // Matrix entry selected by one bit of each endpoint label.
  double entry(bool u_bit, bool v_bit) const {
    if (u_bit && v_bit) return alpha_;
    if (!u_bit && !v_bit) return gamma_;
    return beta_;
  }

  // alpha + 2 beta + gamma, the per-level mass driving the edge count.
  double edge_mass() const { return alpha_ + 2.0 * beta_ + gamma_; }
  // alpha + gamma, the per-level mass driving the self-loop count.
  double loop_mass() const { return alpha_ + gamma_; }

  bool operator==(const Initiator&) const = default;

 private:
  static void check(double value, const char* name) {
    if (!std::isfinite(value)) {
      throw nonfinite_input(std::string(name) + " is not finite");
    }
    if (value < 0.0 || value > 1.0) {
      throw range_violation(std::string(name) + " outside [0, 1]");
    }
  }

  double alpha_;
  double beta_;
  double gamma_;
};

// Validating factory kept as a free function for call sites that prefer it.
inline Initiator validate_initiator(double alpha, double beta, double gamma) {
  return Initiator(alpha, beta, gamma);
}

// Analytic formulas work for any k up to 63: labels fit one machine word and
// no formula enumerates vertices. Samplers impose their own tighter caps.
inline constexpr int kMaxK = 63;

class ModelParams {
 public:
  ModelParams(Initiator theta, int k) : theta_(theta), k_(k) {
    if (k < 1 || k > kMaxK) {
      throw range_violation("k must be in [1, " + std::to_string(kMaxK) + "]");
    }
  }

  const Initiator& theta() const { return theta_; }
  int k() const { return k_; }
  std::uint64_t vertex_count() const { return std::uint64_t{1} << k_; }

  bool operator==(const ModelParams&) const = default;

 private:
  Initiator theta_;
  int k_;
};

// A vertex is identified by the integer whose k-bit big-endian binary
// representation spells its label: label position 0 is the most significant
// of the k bits. The weight of a vertex is the popcount of its label.
class VertexLabel {
 public:
  VertexLabel(std::uint64_t bits, int k) : bits_(bits), k_(k) {
    if (k < 1 || k > kMaxK) {
      throw range_violation("label length must be in [1, " + std::to_string(kMaxK) + "]");
    }
    if (k < 64 && (bits >> k) != 0) {
      throw range_violation("label bits exceed 2^k");
    }
  }

  std::uint64_t bits() const { return bits_; }
  int length() const { return k_; }
  int weight() const { return std::popcount(bits_); }

  // Label digit at position in [0, k), position 0 being the most significant.
  bool bit(int position) const { return (bits_ >> (k_ - 1 - position)) & 1u; }

  bool operator==(const VertexLabel&) const = default;

 private:
  std::uint64_t bits_;
  int k_;
};

// Agreement profile of an ordered label pair: how many positions are (1,1),
// how many differ, and how many are (0,0). mixed == 0 iff the labels are
// identical, i.e. the diagonal / self-loop case.
struct PairSignature {
  int both_ones = 0;
  int mixed = 0;
  int both_zeros = 0;

  int length() const { return both_ones + mixed + both_zeros; }
  bool operator==(const PairSignature&) const = default;
};

inline PairSignature pair_signature(const VertexLabel& u, const VertexLabel& v) {
  if (u.length() != v.length()) {
    throw length_mismatch("labels of different length");
  }
  const int k = u.length();
  const std::uint64_t mask = (k < 64) ? ((std::uint64_t{1} << k) - 1) : ~std::uint64_t{0};
  const int ones = std::popcount(u.bits() & v.bits());
  const int diff = std::popcount(u.bits() ^ v.bits());
  const int zeros = std::popcount(~(u.bits() | v.bits()) & mask);
  return PairSignature{ones, diff, zeros};
}

// Probability that the edge (u, v) exists: the product over all k label
// positions of the initiator entry selected by the two digits there.
inline double edge_probability(const VertexLabel& u, const VertexLabel& v,
                               const Initiator& theta) {
  if (u.length() != v.length()) {
    throw length_mismatch("labels of different length");
  }
  double p = 1.0;
  for (int position = 0; position < u.length(); ++position) {
    p *= theta.entry(u.bit(position), v.bit(position));
  }
  return p;
}

inline double edge_probability(const VertexLabel& u, const VertexLabel& v,
                               const ModelParams& params) {
  if (u.length() != params.k() || v.length() != params.k()) {
    throw length_mismatch("label length does not match k");
  }
  return edge_probability(u, v, params.theta());
}

namespace detail {

inline void require_valid_signature(const PairSignature& sig, int k) {
  if (sig.both_ones < 0 || sig.mixed < 0 || sig.both_zeros < 0 || sig.length() != k) {
    throw invalid_signature("signature parts must be non-negative and sum to k");
  }
}

}  // namespace detail

// alpha^both_ones * beta^mixed * gamma^both_zeros. Evaluated in log space when
// a parameter is tiny or k is large so long products do not underflow early;
// 0^0 is 1 (empty product).
inline double signature_probability(const PairSignature& sig, const Initiator& theta) {
  detail::require_valid_signature(sig, sig.length());
  const int k = sig.length();
  const bool use_log_space =
      theta.alpha() < 1e-3 || theta.beta() < 1e-3 || theta.gamma() < 1e-3 || k > 40;
  if (!use_log_space) {
    return std::pow(theta.alpha(), sig.both_ones) * std::pow(theta.beta(), sig.mixed) *
           std::pow(theta.gamma(), sig.both_zeros);
  }
  double log_p = 0.0;
  const double bases[3] = {theta.alpha(), theta.beta(), theta.gamma()};
  const int exponents[3] = {sig.both_ones, sig.mixed, sig.both_zeros};
  for (int i = 0; i < 3; ++i) {
    if (exponents[i] == 0) continue;
    if (bases[i] == 0.0) return 0.0;
    log_p += exponents[i] * std::log(bases[i]);
  }
  return std::exp(log_p);
}

// Number of ORDERED pairs (u, v) of k-bit labels with this signature:
// multinomial(k; both_ones, mixed, both_zeros) * 2^mixed. Exact for every
// supported k; the grand total over all signatures is 4^k < 2^127.
inline uint128 signature_count(const PairSignature& sig, int k) {
  detail::require_valid_signature(sig, k);
  return multinomial(k, sig.both_ones, sig.mixed) << sig.mixed;
}

inline double signature_count_double(const PairSignature& sig, int k) {
  return to_double(signature_count(sig, k));
}

}  // namespace kron
