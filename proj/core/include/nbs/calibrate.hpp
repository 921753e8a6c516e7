#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nbs/campaign.hpp"

namespace nbs {

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One full algorithm trial at the given budget; `stream` keys all the
// trial's randomness (fresh instance per call).
using TrialFn = std::function<bool(std::uint64_t budget, std::uint64_t stream)>;

struct CalibrationOptions {
  double tau_low = 0.8;    // answer brackets the budget where success ~ 0.8
  double tau_high = 0.9;   // and ~0.9; together they bound the delta = .15 need
  double eps = 0.05;
  double delta = 0.15;     // failure budget of the meta-search itself
  std::uint64_t bracket_trials = 200;
  double bracket_rate = 0.9;
};

struct Calibration {
  std::uint64_t budget_low = 0;   // from the tau_low meta-search
  std::uint64_t budget_high = 0;  // from the tau_high meta-search
  std::vector<std::uint64_t> grid;
};

// Budget calibration as a noisy binary search over the grid: grid budget b
// acts as a coin whose flip runs one full trial at b.  The screening search
// runs once per target tau; returned grid intervals map to the upper budget
// endpoint.  Throws CalibrationError when the top of the grid does not reach
// bracket_rate success (the caller should extend the grid).
Calibration calibrate_budget(const TrialFn& trial,
                             const std::vector<std::uint64_t>& grid,
                             std::uint64_t seed,
                             const CalibrationOptions& options = {});

struct GridOptions {
  double ratio = 1.05;          // geometric step between adjacent budgets
  std::uint64_t min_budget = 8;
  std::uint64_t probe_trials = 120;
  double hi_rate = 0.95;  // doubling pre-scan stops here
  double lo_rate = 0.60;  // halving stops below here
};

// Doubling/halving pre-scan bracketing the success transition, then a
// geometric grid across the bracket.
std::vector<std::uint64_t> build_budget_grid(const TrialFn& trial,
                                             std::uint64_t seed,
                                             const GridOptions& options = {});

// Empirical success rate per grid budget; diagnostic for spotting
// non-monotone grids.
std::vector<double> measure_success_rates(const TrialFn& trial,
                                          const std::vector<std::uint64_t>& grid,
                                          std::uint64_t trials_per_budget,
                                          std::uint64_t seed);

// Production trial closure: algorithm `algo` on fresh instances of `spec`.
TrialFn make_trial_fn(Algorithm algo, const DistributionSpec& spec,
                      double delta_native, std::uint64_t seed);

}  // namespace nbs
