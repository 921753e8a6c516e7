#include "nbs/calibrate.hpp"

#include <cmath>

#include "nbs/rng.hpp"
#include "nbs/screening.hpp"

namespace nbs {
namespace {

double probe_rate(const TrialFn& trial, std::uint64_t budget,
                  std::uint64_t trials, std::uint64_t& stream) {
  std::uint64_t successes = 0;
  for (std::uint64_t i = 0; i < trials; ++i)
    successes += trial(budget, stream++) ? 1 : 0;
  return static_cast<double>(successes) / static_cast<double>(trials);
}

}  // namespace

Calibration calibrate_budget(const TrialFn& trial,
                             const std::vector<std::uint64_t>& grid,
                             std::uint64_t seed,
                             const CalibrationOptions& options) {
  if (grid.size() < 2)
    throw std::invalid_argument("calibrate_budget: need a grid of >= 2 budgets");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1])
      throw std::invalid_argument("calibrate_budget: grid must be increasing");

  // Streams are drawn from one per-calibration counter so reruns with the
  // same seed replay exactly.
  std::uint64_t stream = derive_seed(seed, 0x627261636b6574ULL);

  const double top_rate =
      probe_rate(trial, grid.back(), options.bracket_trials, stream);
  if (top_rate < options.bracket_rate)
    throw CalibrationError(
        "calibrate_budget: success rate at the top of the grid is " +
        std::to_string(top_rate) + " < " + std::to_string(options.bracket_rate) +
        "; extend the grid upward");

  Calibration out;
  out.grid = grid;
  const auto run_meta = [&](double tau) -> std::uint64_t {
    FunctionOracle meta([&](std::int64_t coin) -> int {
      return trial(grid[static_cast<std::size_t>(coin - 1)], stream++) ? 1 : 0;
    });
    ScreeningConfig cfg;
    cfg.delta = options.delta;
    // tau = 0.9 with eps = 0.05 sits exactly on the eps < min(tau,1-tau)/2
    // boundary; nudge inside the admissible domain.
    const double eps = std::min(options.eps, 0.99 * std::min(tau, 1.0 - tau) / 2.0);
    const SearchResult res = bayesian_screening_search(
        meta, static_cast<std::int64_t>(grid.size()), tau, eps, cfg);
    return grid[static_cast<std::size_t>(res.interval)];
  };
  out.budget_low = run_meta(options.tau_low);
  out.budget_high = run_meta(options.tau_high);
  return out;
}

std::vector<std::uint64_t> build_budget_grid(const TrialFn& trial,
                                             std::uint64_t seed,
                                             const GridOptions& options) {
  if (!(options.ratio > 1.0))
    throw std::invalid_argument("build_budget_grid: ratio must exceed 1");
  std::uint64_t stream = derive_seed(seed, 0x7072657363616eULL);

  // Doubling scan for the top of the bracket.
  std::uint64_t hi = std::max<std::uint64_t>(options.min_budget, 1);
  double rate = probe_rate(trial, hi, options.probe_trials, stream);
  int doublings = 0;
  while (rate < options.hi_rate) {
    if (++doublings > 44)
      throw CalibrationError(
          "build_budget_grid: no budget reaches the target success rate");
    hi *= 2;
    rate = probe_rate(trial, hi, options.probe_trials, stream);
  }

  // Halving scan for the bottom.
  std::uint64_t lo = hi;
  while (lo / 2 >= options.min_budget) {
    const double r = probe_rate(trial, lo / 2, options.probe_trials, stream);
    lo /= 2;
    if (r < options.lo_rate) break;
  }
  if (lo == hi) lo = std::max<std::uint64_t>(options.min_budget, hi / 2);

  std::vector<std::uint64_t> grid;
  double b = static_cast<double>(lo);
  while (b < static_cast<double>(hi)) {
    const auto v = static_cast<std::uint64_t>(std::llround(b));
    if (grid.empty() || v > grid.back()) grid.push_back(v);
    b *= options.ratio;
  }
  if (grid.empty() || grid.back() < hi) grid.push_back(hi);
  if (grid.size() < 2) grid.insert(grid.begin(), std::max<std::uint64_t>(1, hi / 2));
  return grid;
}

std::vector<double> measure_success_rates(const TrialFn& trial,
                                          const std::vector<std::uint64_t>& grid,
                                          std::uint64_t trials_per_budget,
                                          std::uint64_t seed) {
  std::uint64_t stream = derive_seed(seed, 0x7261746573ULL);
  std::vector<double> rates;
  rates.reserve(grid.size());
  for (const std::uint64_t b : grid)
    rates.push_back(probe_rate(trial, b, trials_per_budget, stream));
  return rates;
}

TrialFn make_trial_fn(Algorithm algo, const DistributionSpec& spec,
                      double delta_native, std::uint64_t seed) {
  return [algo, spec, delta_native, seed](std::uint64_t budget,
                                          std::uint64_t stream) -> bool {
    const std::uint64_t base = derive_seed(seed, stream);
    return run_algorithm_trial(algo, spec,
                               algorithm_is_budgeted(algo)
                                   ? std::optional<std::uint64_t>(budget)
                                   : std::nullopt,
                               delta_native, derive_seed(base, 1),
                               derive_seed(base, 2), derive_seed(base, 3))
        .success;
  };
}

}  // namespace nbs
