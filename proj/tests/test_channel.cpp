#include "nbs/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"

using namespace nbs;

namespace {

// (tau, eps) grid used by the identity suite: 9 tau values, 20 eps values
// spread up to just below the admissible ceiling.
std::vector<std::pair<double, double>> parameter_grid() {
  std::vector<std::pair<double, double>> grid;
  for (int ti = 1; ti <= 9; ++ti) {
    const double tau = 0.1 * ti;
    const double eps_hi = 0.99 * std::min(tau, 1.0 - tau) / 2.0;
    for (int ei = 0; ei < 20; ++ei) {
      const double eps = 0.01 + (eps_hi - 0.01) * ei / 19.0;
      grid.emplace_back(tau, eps);
    }
  }
  return grid;
}

}  // namespace

TEST_SUITE("channel") {

TEST_CASE("binary entropy basics") {
  CHECK_NEAR(binary_entropy(0.5), 1.0, 1e-15);
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  // frozen from a 40-digit evaluation of -0.4 lg 0.4 - 0.6 lg 0.6
  CHECK_NEAR(binary_entropy(0.4), 0.9709505944546686, 1e-14);
  CHECK_NEAR(binary_entropy(0.25), 0.8112781244591328, 1e-14);
  CHECK_THROWS_AS(binary_entropy(-0.1), std::domain_error);
  CHECK_THROWS_AS(binary_entropy(1.1), std::domain_error);
}

TEST_CASE("symmetric channel collapses to the known closed form") {
  const ChannelParams ch = channel_params(0.5, 0.1);
  CHECK_NEAR(ch.q, 0.5, 1e-9);
  CHECK_NEAR(ch.d00, 0.8, 1e-9);
  CHECK_NEAR(ch.d01, 1.2, 1e-9);
  CHECK_NEAR(ch.d10, 1.2, 1e-9);
  CHECK_NEAR(ch.d11, 0.8, 1e-9);
  // capacity = 1 - H(1/2 - eps)
  CHECK_NEAR(ch.capacity, 1.0 - binary_entropy(0.4), 1e-12);
  for (const double eps : {0.02, 0.07, 0.2}) {
    const ChannelParams c = channel_params(0.5, eps);
    CHECK_NEAR(c.capacity, 1.0 - binary_entropy(0.5 - eps), 1e-11);
    CHECK_NEAR(c.q, 0.5, 1e-9);
  }
}

TEST_CASE("asymmetric channel against the dense-grid maximization oracle") {
  // Dense grid at 1e-6 resolution over q, refined around the coarse argmax.
  const double tau = 0.75, eps = 0.1;
  double best_q = 0.0, best_v = -1.0;
  for (int i = 1; i < 1000; ++i) {
    const double x = i / 1000.0;
    const double v = capacity_objective(tau, eps, x);
    if (v > best_v) {
      best_v = v;
      best_q = x;
    }
  }
  const double center = best_q;
  for (int i = -1000; i <= 1000; ++i) {
    const double x = center + i * 1e-6;
    if (x <= 0.0 || x >= 1.0) continue;
    const double v = capacity_objective(tau, eps, x);
    if (v > best_v) {
      best_v = v;
      best_q = x;
    }
  }
  const ChannelParams ch = channel_params(tau, eps);
  CHECK_NEAR(ch.q, best_q, 2e-6);
  CHECK_NEAR(ch.capacity, best_v, 1e-9);
  // frozen from the independent 40-digit evaluation
  CHECK_NEAR(ch.q, 0.5233605823363207, 1e-9);
  CHECK_NEAR(ch.capacity, 0.03940863249194593, 1e-12);
}

TEST_CASE("maximization route agrees with the closed form") {
  CHECK_NEAR(capacity_by_maximization(0.5, 0.1), 1.0 - binary_entropy(0.4),
             1e-9);
  CHECK_NEAR(capacity_by_maximization(0.6, 0.05),
             channel_params(0.6, 0.05).capacity, 1e-9);
  // frozen: C(0.6, 0.05)
  CHECK_NEAR(channel_params(0.6, 0.05).capacity, 0.007529707069910023, 1e-12);
  // eps -> 0 limit: within 10% of eps^2 / (2 tau (1-tau) ln 2)
  for (const double tau : {0.3, 0.5, 0.7}) {
    const double eps = 1e-4;
    const double approx = eps * eps / (2.0 * tau * (1.0 - tau) * std::log(2.0));
    const double c = capacity_by_maximization(tau, eps);
    CHECK(c / approx > 0.9);
    CHECK(c / approx < 1.1);
  }
}

TEST_CASE("parameter domain errors") {
  CHECK_THROWS_AS(channel_params(0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(channel_params(1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(channel_params(0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(channel_params(0.5, 0.25), std::invalid_argument);  // = bound
  CHECK_THROWS_AS(channel_params(0.2, 0.11), std::invalid_argument);
}

TEST_CASE("identity suite on the parameter grid") {
  for (const auto& [tau, eps] : parameter_grid()) {
    CAPTURE(tau);
    CAPTURE(eps);
    const ChannelParams ch = channel_params(tau, eps);

    // Two algebraic routes to the capacity through the d factors.
    const double via_heads = (tau + eps) * std::log2(ch.d10) +
                             (1.0 - tau - eps) * std::log2(ch.d00);
    const double via_tails = (tau - eps) * std::log2(ch.d11) +
                             (1.0 - tau + eps) * std::log2(ch.d01);
    CHECK(std::fabs(via_heads - ch.capacity) <= 1e-10);
    CHECK(std::fabs(via_tails - ch.capacity) <= 1e-10);

    // Two-sided capacity bounds.
    const double scale = eps * eps / (std::log(2.0) * tau * (1.0 - tau));
    CHECK(ch.capacity >= 0.5 * scale);
    CHECK(ch.capacity <= scale);

    // Quantile deviation bound.
    CHECK(std::fabs(ch.q - 0.5) <= 2.0 * eps / (tau * (1.0 - tau)));

    // Log-factor bounds.
    CHECK(std::log2(ch.d00) >= -3.0 * eps / (1.0 - tau));
    CHECK(-std::log2(ch.d01) >= -3.0 * eps / (1.0 - tau));
    CHECK(-std::log2(ch.d10) >= -3.0 * eps / tau);
    CHECK(std::log2(ch.d11) >= -3.0 * eps / tau);

    // Normalization identities.
    CHECK(std::fabs(ch.q * ch.d10 + (1.0 - ch.q) * ch.d11 - 1.0) <= 1e-12);
    CHECK(std::fabs(ch.q * ch.d00 + (1.0 - ch.q) * ch.d01 - 1.0) <= 1e-12);

    // Factor orderings.
    CHECK(ch.d11 < 1.0);
    CHECK(1.0 < ch.d10);
    CHECK(ch.d00 < 1.0);
    CHECK(1.0 < ch.d01);
  }
}

TEST_CASE("capacity scaling in eps") {
  // capacity(tau, a*eps) >= (a^2/2) capacity(tau, eps), and monotonicity.
  for (const double tau : {0.2, 0.5, 0.8}) {
    const double eps_hi = 0.99 * std::min(tau, 1.0 - tau) / 2.0;
    double prev = 0.0;
    for (int i = 1; i <= 12; ++i) {
      const double eps = eps_hi * i / 12.0;
      const double c = channel_params(tau, eps).capacity;
      CHECK(c > prev);
      prev = c;
    }
    const double c_full = channel_params(tau, eps_hi).capacity;
    for (const double alpha : {0.25, 0.5, 0.75, 1.0}) {
      const double c_scaled = channel_params(tau, alpha * eps_hi).capacity;
      CHECK(c_scaled >= 0.5 * alpha * alpha * c_full * (1.0 - 1e-12));
    }
  }
}

TEST_CASE("expectation floor") {
  CHECK(expectation_floor(1000, 0.5, 0.1, 1.0) == 0.0);
  CHECK(expectation_floor(3, 0.5, 0.1, 0.0) == 0.0);  // lg(1) - 1 < 0, clamped
  // frozen: (1 - 0.1) (lg(10^6 - 2) - 1) / C(0.5, 0.1)
  CHECK_NEAR(expectation_floor(1000000, 0.5, 0.1, 0.1), 586.5321095452293,
             1e-9);
  CHECK_THROWS_AS(expectation_floor(2, 0.5, 0.1, 0.1), std::invalid_argument);
}

}  // TEST_SUITE
