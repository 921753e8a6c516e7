#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nbs/oracle.hpp"
#include "nbs/posterior.hpp"
#include "nbs/search_result.hpp"

namespace nbs {

// Classic binary search with repetition: each of the ceil(lg n) levels
// flips its probe coin floor(budget / ceil(lg n)) times and descends left
// when the empirical mean reaches tau.  Requires budget >= ceil(lg n).
template <CoinOracleLike O>
SearchResult naive_nbs(O& oracle, std::int64_t n, double tau, double /*eps*/,
                       std::uint64_t budget) {
  if (n < 2) throw std::invalid_argument("naive_nbs: need n >= 2");
  SearchResult res;
  if (n == 2) {
    res.interval = 1;
    res.report.answer = 1;
    return res;
  }
  const auto levels =
      static_cast<std::uint64_t>(std::ceil(std::log2(static_cast<double>(n))));
  const std::uint64_t per_level = budget / levels;
  if (per_level < 1)
    throw std::invalid_argument("naive_nbs: budget below one flip per level");
  const std::uint64_t start = oracle.flips_used();
  std::int64_t lo = 0, hi = n;
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    std::uint64_t heads = 0;
    for (std::uint64_t k = 0; k < per_level; ++k)
      heads += static_cast<std::uint64_t>(oracle.flip(mid));
    const double mean =
        static_cast<double>(heads) / static_cast<double>(per_level);
    if (mean >= tau)
      hi = mid;
    else
      lo = mid;
  }
  res.interval = std::clamp<std::int64_t>(lo, 1, n - 1);
  res.report.answer = res.interval;
  res.report.flips_used = oracle.flips_used() - start;
  res.report.add_stage("search", res.report.flips_used);
  return res;
}

// Conservative multiplicative-weights update factors (1 +- (3/5) eps).
inline std::pair<double, double> mw_update_factors(double eps) {
  return {1.0 + 0.6 * eps, 1.0 - 0.6 * eps};
}

struct MwConfig {
  // Fraction of the budget reserved for testing the two candidates.
  double verify_fraction = 0.2;
};

// Multiplicative-weights search over intervals: queries the posterior median
// and nudges the two sides by 1 +- (3/5) eps instead of the full Bayesian
// factors.  The reserved tail of the budget bias-tests the two candidate
// answers this walk is known to produce -- the interval queried at the
// median time and the last interval queried -- and returns whichever passes
// (the better-scoring one if both or neither do).
template <CoinOracleLike O>
SearchResult kk_multiplicative_weights(O& oracle, std::int64_t n, double tau,
                                       double eps, std::uint64_t budget,
                                       MwConfig cfg = {}) {
  if (n < 2)
    throw std::invalid_argument("kk_multiplicative_weights: need n >= 2");
  if (budget < 1)
    throw std::invalid_argument("kk_multiplicative_weights: need budget >= 1");
  SearchResult res;
  if (n == 2) {
    res.interval = 1;
    res.report.answer = 1;
    return res;
  }
  const std::uint64_t start = oracle.flips_used();
  auto reserve = static_cast<std::uint64_t>(
      std::llround(cfg.verify_fraction * static_cast<double>(budget)));
  reserve = std::clamp<std::uint64_t>(reserve, std::min<std::uint64_t>(budget, 8),
                                      budget);
  const std::uint64_t iterations = budget - reserve;

  const auto [up, down] = mw_update_factors(eps);
  Posterior posterior(n - 1);
  std::int64_t median_time_interval = -1;
  std::int64_t last_interval = -1;
  const std::uint64_t median_time = (iterations + 1) / 2;
  for (std::uint64_t t = 1; t <= iterations; ++t) {
    const double q = std::min(0.5, posterior.total());
    const std::int64_t j = posterior.interval_at_quantile(q);
    const std::int64_t x = posterior.round_to_coin(j, q);
    const int y = oracle.flip(x);
    // Heads favors the crossing being left of the probe.  The two sides
    // split at the probe coin itself; no fractional boundary handling.
    if (y == 1)
      posterior.apply_split_update(x, up, down);
    else
      posterior.apply_split_update(x, down, up);
    if (t == median_time) median_time_interval = j;
    last_interval = j;
  }
  const std::uint64_t after_walk = oracle.flips_used();
  res.report.add_stage("walk", after_walk - start);

  std::vector<std::int64_t> candidates;
  if (median_time_interval > 0) candidates.push_back(median_time_interval);
  if (last_interval > 0 && last_interval != median_time_interval)
    candidates.push_back(last_interval);

  if (candidates.empty()) {
    res.interval = 1;
    res.report.scan_fallback = true;
  } else {
    const std::uint64_t per_estimate = reserve / (2 * candidates.size());
    if (per_estimate == 0) {
      res.interval = candidates.back();
      res.report.scan_fallback = true;
    } else {
      // score <= 0 means both endpoint estimates sit inside the half-margin
      // test band.  The first candidate to pass wins -- the median-time
      // interval is the one the walk's analysis vouches for, so it is tested
      // first; only a double failure falls back to the better estimate.
      double best_score = 0.0;
      std::int64_t best = -1;
      bool passed = false;
      for (const std::int64_t x : candidates) {
        std::uint64_t heads_lo = 0, heads_hi = 0;
        for (std::uint64_t k = 0; k < per_estimate; ++k)
          heads_lo += static_cast<std::uint64_t>(oracle.flip(x));
        for (std::uint64_t k = 0; k < per_estimate; ++k)
          heads_hi += static_cast<std::uint64_t>(oracle.flip(x + 1));
        const double p_lo =
            static_cast<double>(heads_lo) / static_cast<double>(per_estimate);
        const double p_hi =
            static_cast<double>(heads_hi) / static_cast<double>(per_estimate);
        // Tested against the band edges: good means [p_x, p_{x+1}] meets
        // the open interval (tau - eps, tau + eps).
        const double score = std::max(p_lo - (tau + eps), (tau - eps) - p_hi);
        if (score <= 0.0) {
          res.interval = x;
          passed = true;
          break;
        }
        if (best < 0 || score < best_score) {
          best = x;
          best_score = score;
        }
      }
      if (!passed) {
        res.interval = best;
        res.report.scan_fallback = true;
      }
    }
  }
  res.report.add_stage("verify", oracle.flips_used() - after_walk);
  res.report.answer = res.interval;
  res.report.flips_used = oracle.flips_used() - start;
  return res;
}

struct BacktrackingConfig {
  // Votes per comparison, as votes_coeff / eps^2; conservative by design to
  // match the cited analysis's worst-case character.
  double votes_coeff = 20.0;
  // Consecutive net confirmations required at a leaf before answering.
  std::int64_t leaf_confirm = 192;
};

// Tree-walk noisy search with repeated votes, per-node consistency checks,
// and backtracking on contradiction.  The walk itself has no stopping budget,
// so a run that would exceed `budget` flips hard-fails instead (failed=true,
// flips_used >= budget).
template <CoinOracleLike O>
SearchResult kk_backtracking(O& oracle, std::int64_t n, double tau, double eps,
                             std::uint64_t budget, BacktrackingConfig cfg = {}) {
  if (n < 2) throw std::invalid_argument("kk_backtracking: need n >= 2");
  if (budget < 1)
    throw std::invalid_argument("kk_backtracking: need budget >= 1");
  SearchResult res;
  if (n == 2) {
    res.interval = 1;
    res.report.answer = 1;
    return res;
  }
  const auto votes = static_cast<std::uint64_t>(
      std::ceil(cfg.votes_coeff / (eps * eps)));
  const std::uint64_t start = oracle.flips_used();
  oracle.restrict_budget(budget);

  // Returns true if the empirical mean of `votes` flips reaches tau.
  // Virtual coins 0 and n+1 vote deterministically low/high for free.
  const auto vote_high = [&](std::int64_t coin) -> bool {
    if (coin <= 0) return false;
    if (coin > n) return true;
    std::uint64_t heads = 0;
    for (std::uint64_t k = 0; k < votes; ++k)
      heads += static_cast<std::uint64_t>(oracle.flip(coin));
    return static_cast<double>(heads) >= tau * static_cast<double>(votes);
  };

  struct Frame {
    std::int64_t lo, hi;  // crossing believed inside (lo, hi); lo low, hi high
    std::int64_t counter = 0;
  };

  try {
    std::vector<Frame> stack;
    stack.push_back({0, n + 1, 0});
    while (true) {
      Frame& frame = stack.back();
      if (frame.hi - frame.lo == 1) {
        const bool consistent = !vote_high(frame.lo) && vote_high(frame.hi);
        frame.counter += consistent ? 1 : -1;
        if (frame.counter >= cfg.leaf_confirm) {
          res.interval = std::clamp<std::int64_t>(frame.lo, 1, n - 1);
          break;
        }
        if (frame.counter < 0) {
          if (stack.size() > 1)
            stack.pop_back();
          else
            stack.back().counter = 0;
        }
        continue;
      }
      // Re-test the node's own invariant before descending further.
      if (vote_high(frame.lo) || !vote_high(frame.hi)) {
        if (stack.size() > 1) stack.pop_back();
        continue;
      }
      const std::int64_t mid = frame.lo + (frame.hi - frame.lo) / 2;
      if (vote_high(mid))
        stack.push_back({frame.lo, mid, 0});
      else
        stack.push_back({mid, frame.hi, 0});
    }
    res.report.answer = res.interval;
  } catch (const BudgetExhausted&) {
    res.interval = -1;
    res.report.failed = true;
  }
  res.report.flips_used = oracle.flips_used() - start;
  res.report.add_stage("walk", res.report.flips_used);
  return res;
}

}  // namespace nbs
