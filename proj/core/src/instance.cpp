#include "nbs/instance.hpp"

#include <stdexcept>

namespace nbs {
namespace {

void check_common(std::int64_t n, double lo, double hi) {
  if (n < 2) throw std::invalid_argument("ProblemInstance: need n >= 2 coins");
  if (!(lo >= 0.0 && lo <= hi && hi <= 1.0))
    throw std::invalid_argument("ProblemInstance: need 0 <= lo <= hi <= 1");
}

}  // namespace

ProblemInstance ProblemInstance::step(std::int64_t n, double tau, double eps,
                                      std::int64_t cross, double lo, double hi) {
  check_common(n, lo, hi);
  if (cross < 0 || cross > n)
    throw std::invalid_argument("ProblemInstance: cross must lie in [0, n]");
  ProblemInstance out;
  out.profile_ = Profile::kStep;
  out.n_ = n;
  out.tau_ = tau;
  out.eps_ = eps;
  out.cross_ = cross;
  out.lo_ = lo;
  out.hi_ = hi;
  return out;
}

ProblemInstance ProblemInstance::ramp(std::int64_t n, double tau, double eps,
                                      std::int64_t win_start,
                                      std::int64_t win_len, double lo,
                                      double hi) {
  check_common(n, lo, hi);
  if (win_len < 2 || win_start < 0 || win_start + win_len > n)
    throw std::invalid_argument("ProblemInstance: ramp window does not fit");
  ProblemInstance out;
  out.profile_ = Profile::kRamp;
  out.n_ = n;
  out.tau_ = tau;
  out.eps_ = eps;
  out.win_start_ = win_start;
  out.win_len_ = win_len;
  out.lo_ = lo;
  out.hi_ = hi;
  return out;
}

ProblemInstance ProblemInstance::from_values(double tau, double eps,
                                             std::vector<double> p) {
  if (p.size() < 2)
    throw std::invalid_argument("ProblemInstance: need n >= 2 coins");
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0 && p[i] <= 1.0))
      throw std::invalid_argument("ProblemInstance: probabilities in [0, 1]");
    if (i > 0 && p[i] < p[i - 1])
      throw std::invalid_argument("ProblemInstance: p must be nondecreasing");
  }
  ProblemInstance out;
  out.profile_ = Profile::kDense;
  out.n_ = static_cast<std::int64_t>(p.size());
  out.tau_ = tau;
  out.eps_ = eps;
  out.values_ = std::move(p);
  return out;
}

double ProblemInstance::p(std::int64_t i) const {
  if (i <= 0) {
    if (i == 0) return 0.0;
    throw std::out_of_range("ProblemInstance: coin index out of range");
  }
  if (i > n_) {
    if (i == n_ + 1) return 1.0;
    throw std::out_of_range("ProblemInstance: coin index out of range");
  }
  switch (profile_) {
    case Profile::kStep:
      return i <= cross_ ? lo_ : hi_;
    case Profile::kRamp:
      if (i <= win_start_) return lo_;
      if (i > win_start_ + win_len_) return hi_;
      return lo_ + (hi_ - lo_) * static_cast<double>(i - win_start_ - 1) /
                       static_cast<double>(win_len_ - 1);
    case Profile::kDense:
      return values_[static_cast<std::size_t>(i - 1)];
  }
  return 0.0;  // unreachable
}

bool ProblemInstance::is_good(std::int64_t interval, double eps_check) const {
  if (interval < 1 || interval > n_ - 1)
    throw std::out_of_range("is_good: interval index out of range");
  return p(interval) < tau_ + eps_check && p(interval + 1) > tau_ - eps_check;
}

std::int64_t ProblemInstance::count_good(double eps_check) const {
  std::int64_t count = 0;
  for (std::int64_t i = 1; i <= n_ - 1; ++i)
    if (is_good(i, eps_check)) ++count;
  return count;
}

}  // namespace nbs
