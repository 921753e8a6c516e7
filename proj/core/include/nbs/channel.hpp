#pragma once

#include <cstdint>

namespace nbs {

// Derived constants of the binary asymmetric channel that emits heads with
// probability tau - eps or tau + eps depending on which side of the hidden
// crossing the flipped coin lies.
//
// The d factors are the multiplicative effect of outcome x (0 = tails,
// 1 = heads) on interval mass on side y (0 = left, 1 = right) of the
// flipped coin, so e.g. heads boosts mass to the left: d11 < 1 < d10.
struct ChannelParams {
  double tau = 0.0;
  double eps = 0.0;
  double z = 0.0;         // 2^((H(tau-eps) - H(tau+eps)) / (2 eps))
  double q = 0.0;         // capacity-achieving posterior quantile
  double capacity = 0.0;  // bits per flip
  double d00 = 0.0;
  double d01 = 0.0;
  double d10 = 0.0;
  double d11 = 0.0;
};

// Binary entropy in bits, with the 0 * lg 0 = 0 convention.
// Throws std::domain_error outside [0, 1].
double binary_entropy(double p);

// Mutual-information objective of the channel at input quantile q:
//   H((1-q)(tau-eps) + q(tau+eps)) - (1-q) H(tau-eps) - q H(tau+eps)
double capacity_objective(double tau, double eps, double q);

// All channel constants from the closed forms, with an internal consistency
// check.  If the closed forms lose too much precision (tiny eps, extreme
// tau), q is recovered by numeric maximization instead; if even that fails
// the invariants, throws std::runtime_error.
// Preconditions: 0 < tau < 1 and 0 < eps < min(tau, 1-tau)/2.
ChannelParams channel_params(double tau, double eps);

// Independent numeric route to the capacity: golden-section maximization of
// capacity_objective over q in (0, 1).  Used as the oracle against the
// closed-form channel_params().capacity; do not fold the two together.
double capacity_by_maximization(double tau, double eps);

// Argmax companion of capacity_by_maximization.
double quantile_by_maximization(double tau, double eps);

// Information-theoretic floor on expected queries for failure probability
// delta: (1 - delta) * (lg(n-2) - 1) / capacity, clamped at 0.
// Reported by the harness as a sanity diagnostic.  Requires n >= 3.
double expectation_floor(std::uint64_t n, double tau, double eps, double delta);

}  // namespace nbs
