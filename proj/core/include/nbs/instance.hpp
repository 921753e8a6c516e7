#pragma once

#include <cstdint>
#include <vector>

namespace nbs {

// One MonotonicNBS input: n coins with nondecreasing heads probabilities,
// plus the (tau, eps) target band.  Step and ramp profiles are stored
// implicitly so a fresh million-coin instance costs O(1); explicit vectors
// are supported for arbitrary inputs.
//
// Coin indices are 1-based.  p(0) == 0 and p(n+1) == 1 act as virtual
// sentinels where padding needs them.
class ProblemInstance {
 public:
  // p_i = lo for i <= cross, hi for i > cross.
  static ProblemInstance step(std::int64_t n, double tau, double eps,
                              std::int64_t cross, double lo, double hi);

  // p_i = lo left of the window, hi right of it, and a linear ramp from lo
  // to hi across the win_len coins starting at win_start+1.
  static ProblemInstance ramp(std::int64_t n, double tau, double eps,
                              std::int64_t win_start, std::int64_t win_len,
                              double lo, double hi);

  static ProblemInstance from_values(double tau, double eps,
                                     std::vector<double> p);

  std::int64_t n() const { return n_; }
  double tau() const { return tau_; }
  double eps() const { return eps_; }

  double p(std::int64_t i) const;

  // True iff [p_i, p_{i+1}] meets the open band (tau - eps_check,
  // tau + eps_check); these intervals are the acceptable answers.
  bool is_good(std::int64_t interval, double eps_check) const;

  std::int64_t count_good(double eps_check) const;

 private:
  ProblemInstance() = default;

  enum class Profile { kStep, kRamp, kDense };
  Profile profile_ = Profile::kStep;
  std::int64_t n_ = 0;
  double tau_ = 0.0;
  double eps_ = 0.0;
  std::int64_t cross_ = 0;
  std::int64_t win_start_ = 0;
  std::int64_t win_len_ = 0;
  double lo_ = 0.0;
  double hi_ = 1.0;
  std::vector<double> values_;
};

}  // namespace nbs
