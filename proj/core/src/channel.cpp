#include "nbs/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nbs {
namespace {

// Internals run in long double; the formulas involve difference quotients
// with a 1/(2 eps) amplification, and the extra mantissa bits keep the
// closed forms comfortably inside the 1e-10 identity tolerances.
long double entropy_l(long double p) {
  if (p <= 0.0L || p >= 1.0L) return 0.0L;
  return -(p * std::log2(p) + (1.0L - p) * std::log2(1.0L - p));
}

// lg(1 + 2^t) without overflow for large |t|.
long double lg1p_exp2(long double t) {
  constexpr long double kInvLn2 = 1.442695040888963407359924681001892137L;
  if (t >= 0.0L)
    return t + std::log1p(std::exp2(-t)) * kInvLn2;
  return std::log1p(std::exp2(t)) * kInvLn2;
}

// 1 / (1 + 2^t) without overflow.
long double inv_one_plus_exp2(long double t) {
  if (t >= 0.0L) {
    const long double e = std::exp2(-t);
    return e / (1.0L + e);
  }
  return 1.0L / (1.0L + std::exp2(t));
}

void check_domain(double tau, double eps) {
  if (!(tau > 0.0 && tau < 1.0))
    throw std::invalid_argument("channel: tau must lie in (0, 1), got " +
                                std::to_string(tau));
  const double eps_max = std::min(tau, 1.0 - tau) / 2.0;
  if (!(eps > 0.0 && eps < eps_max))
    throw std::invalid_argument("channel: need 0 < eps < min(tau,1-tau)/2, got eps=" +
                                std::to_string(eps));
}

long double objective_l(long double tau, long double eps, long double q) {
  return entropy_l((1.0L - q) * (tau - eps) + q * (tau + eps)) -
         (1.0L - q) * entropy_l(tau - eps) - q * entropy_l(tau + eps);
}

struct MaximizeResult {
  long double q;
  long double value;
};

// Golden-section search; the objective is strictly concave in q.
MaximizeResult maximize_objective(long double tau, long double eps) {
  constexpr long double kGolden = 0.6180339887498948482045868343656381L;
  long double lo = 1e-15L, hi = 1.0L - 1e-15L;
  long double x1 = hi - kGolden * (hi - lo);
  long double x2 = lo + kGolden * (hi - lo);
  long double f1 = objective_l(tau, eps, x1);
  long double f2 = objective_l(tau, eps, x2);
  for (int it = 0; it < 220; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGolden * (hi - lo);
      f2 = objective_l(tau, eps, x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kGolden * (hi - lo);
      f1 = objective_l(tau, eps, x1);
    }
  }
  const long double q = 0.5L * (lo + hi);
  return {q, objective_l(tau, eps, q)};
}

struct Derived {
  long double q, capacity, d00, d01, d10, d11;
};

Derived derive_from_q(long double tau, long double eps, long double q,
                      long double capacity) {
  // tau + (2q-1) eps is the marginal heads probability at quantile q under
  // the two-sided prior; both denominators come from it.
  const long double dn1 = tau + (2.0L * q - 1.0L) * eps;        // right/heads
  const long double dn0 = 1.0L - tau - (2.0L * q - 1.0L) * eps; // left/tails
  Derived d;
  d.q = q;
  d.capacity = capacity;
  d.d10 = (tau + eps) / dn1;
  d.d11 = (tau - eps) / dn1;
  d.d00 = (1.0L - tau - eps) / dn0;
  d.d01 = (1.0L - tau + eps) / dn0;
  return d;
}

bool invariants_hold(long double tau, long double eps, const Derived& d,
                     long double tol) {
  if (!(d.q > 0.0L && d.q < 1.0L)) return false;
  if (!(d.capacity > 0.0L)) return false;
  if (!(d.d11 < 1.0L && 1.0L < d.d10)) return false;
  if (!(d.d00 < 1.0L && 1.0L < d.d01)) return false;
  const long double n1 = d.q * d.d10 + (1.0L - d.q) * d.d11;
  const long double n0 = d.q * d.d00 + (1.0L - d.q) * d.d01;
  if (std::fabs(n1 - 1.0L) > tol || std::fabs(n0 - 1.0L) > tol) return false;
  constexpr long double kLn2 = 0.6931471805599453094172321214581766L;
  const long double scale = eps * eps / (kLn2 * tau * (1.0L - tau));
  if (d.capacity < 0.5L * scale * (1.0L - 1e-9L)) return false;
  if (d.capacity > scale * (1.0L + 1e-9L)) return false;
  return true;
}

}  // namespace

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::domain_error("binary_entropy: p must lie in [0, 1], got " +
                            std::to_string(p));
  return static_cast<double>(entropy_l(static_cast<long double>(p)));
}

double capacity_objective(double tau, double eps, double q) {
  check_domain(tau, eps);
  return static_cast<double>(objective_l(tau, eps, q));
}

ChannelParams channel_params(double tau, double eps) {
  check_domain(tau, eps);
  const long double t = static_cast<long double>(tau);
  const long double e = static_cast<long double>(eps);

  const long double expo = (entropy_l(t - e) - entropy_l(t + e)) / (2.0L * e);
  const long double z = std::exp2(expo);
  const long double q = ((1.0L - t + e) - inv_one_plus_exp2(expo)) / (2.0L * e);
  const long double capacity = lg1p_exp2(expo) +
                               (t - e) / (2.0L * e) * entropy_l(t + e) -
                               (t + e) / (2.0L * e) * entropy_l(t - e);

  Derived d = derive_from_q(t, e, q, capacity);
  if (!invariants_hold(t, e, d, 1e-8L)) {
    // Closed form lost too much precision; recover q numerically.
    const MaximizeResult m = maximize_objective(t, e);
    d = derive_from_q(t, e, m.q, m.value);
    if (!invariants_hold(t, e, d, 1e-6L))
      throw std::runtime_error(
          "channel_params: closed form and numeric maximization disagree at tau=" +
          std::to_string(tau) + " eps=" + std::to_string(eps));
  }

  ChannelParams out;
  out.tau = tau;
  out.eps = eps;
  out.z = static_cast<double>(z);
  out.q = static_cast<double>(d.q);
  out.capacity = static_cast<double>(d.capacity);
  out.d00 = static_cast<double>(d.d00);
  out.d01 = static_cast<double>(d.d01);
  out.d10 = static_cast<double>(d.d10);
  out.d11 = static_cast<double>(d.d11);
  return out;
}

double capacity_by_maximization(double tau, double eps) {
  check_domain(tau, eps);
  return static_cast<double>(maximize_objective(tau, eps).value);
}

double quantile_by_maximization(double tau, double eps) {
  check_domain(tau, eps);
  return static_cast<double>(maximize_objective(tau, eps).q);
}

double expectation_floor(std::uint64_t n, double tau, double eps, double delta) {
  if (n < 3) throw std::invalid_argument("expectation_floor: need n >= 3");
  if (!(delta >= 0.0 && delta <= 1.0))
    throw std::invalid_argument("expectation_floor: delta must lie in [0, 1]");
  const double capacity = channel_params(tau, eps).capacity;
  const double v =
      (1.0 - delta) * (std::log2(static_cast<double>(n - 2)) - 1.0) / capacity;
  return v > 0.0 ? v : 0.0;
}

}  // namespace nbs
