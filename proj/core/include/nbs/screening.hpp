#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "nbs/baselines.hpp"
#include "nbs/bayes_learn.hpp"
#include "nbs/channel.hpp"
#include "nbs/oracle.hpp"
#include "nbs/rng.hpp"
#include "nbs/search_result.hpp"

namespace nbs {

struct ScreeningConfig {
  double delta = 0.1;
  // Top-level gamma of the search procedure.  When set it drives the
  // reduction subsampling directly (the recursive invocation runs with 1/7
  // here); when unset the reduction uses gamma_reduction's default.
  std::optional<double> gamma_top;
  // Subsampling rate of the outer reduction; defaults to 1/(3 lg n) at call
  // time.  The procedure header's own default would be 1/(7 lg n); both
  // literals are kept as written.
  std::optional<double> gamma_reduction;
  double gamma_recursive = 1.0 / 7.0;
  double c1 = 2.0;
  double c2 = 2.0;
  // Multiplier on the Hoeffding sample counts of the bias estimates.
  double estimator_constant = 1.0;
  std::optional<std::uint64_t> budget_cap;
};

// Test/diagnostic instrumentation; production callers pass nullptr.
struct ScreeningProbe {
  std::vector<std::int64_t> candidates;            // sorted dedup R, top level
  std::vector<std::int64_t> recursion_map;         // padded coin list, if any
  std::vector<std::int64_t> recursion_candidates;  // sorted dedup R', depth 1
  struct Estimate {
    int depth;
    std::int64_t coin;  // index within that depth's coin set
    double value;
    double accuracy;
  };
  std::vector<Estimate> estimates;
  double eps_prime = 0.0;
};

// Every ceil(gamma |L|)-th element of L, in order, duplicates kept.
inline std::vector<std::int64_t> subsample_quantiles_raw(
    const std::vector<std::int64_t>& list, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw std::invalid_argument("subsample_quantiles: need 0 < gamma <= 1");
  std::vector<std::int64_t> out;
  if (list.empty()) return out;
  const auto size = static_cast<std::uint64_t>(list.size());
  const auto stride = static_cast<std::uint64_t>(
      std::ceil(gamma * static_cast<double>(size)));
  for (std::uint64_t i = stride; i <= size; i += stride)
    out.push_back(list[static_cast<std::size_t>(i - 1)]);
  return out;
}

// Same, duplicates removed (first occurrence wins).  The result has at most
// floor(1/gamma) entries.
inline std::vector<std::int64_t> subsample_quantiles(
    const std::vector<std::int64_t>& list, double gamma) {
  const std::vector<std::int64_t> raw = subsample_quantiles_raw(list, gamma);
  std::vector<std::int64_t> out;
  for (const std::int64_t v : raw)
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  return out;
}

// Runs the learner long enough that a gamma fraction of the chosen intervals
// is good with probability 1 - delta, then keeps the gamma-quantile
// subsample.  Returns the deduplicated candidate list in visit order.
template <CoinOracleLike O>
std::vector<std::int64_t> reduction_to_gamma(O& oracle, std::int64_t n,
                                             const ChannelParams& ch,
                                             double delta, double gamma,
                                             double c1 = 2.0, double c2 = 2.0) {
  const std::uint64_t steps = bayes_learn_iterations(
      static_cast<std::uint64_t>(n), delta, gamma, ch.capacity, c1, c2);
  const LearnTranscript t = bayes_learn(oracle, n, ch, steps);
  return subsample_quantiles(t.intervals, gamma);
}

template <CoinOracleLike O>
std::vector<std::int64_t> reduction_to_gamma(O& oracle, std::int64_t n,
                                             double tau, double eps,
                                             double delta, double gamma,
                                             double c1 = 2.0, double c2 = 2.0) {
  return reduction_to_gamma(oracle, n, channel_params(tau, eps), delta, gamma,
                            c1, c2);
}

// Empirical mean of ceil(scale * ln(2/delta) / (2 accuracy^2)) flips; by
// Hoeffding the estimate is within +-accuracy of the bias with probability
// at least 1 - delta (at scale 1).
template <CoinOracleLike O>
double estimate_bias(O& oracle, std::int64_t coin, double accuracy,
                     double delta, double scale = 1.0) {
  if (!(accuracy > 0.0))
    throw std::invalid_argument("estimate_bias: accuracy must be positive");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("estimate_bias: delta must lie in (0, 1)");
  const double raw =
      scale * std::log(2.0 / delta) / (2.0 * accuracy * accuracy);
  auto flips = static_cast<std::uint64_t>(std::ceil(raw));
  if (flips < 1) flips = 1;
  std::uint64_t heads = 0;
  for (std::uint64_t i = 0; i < flips; ++i)
    heads += static_cast<std::uint64_t>(oracle.flip(coin));
  return static_cast<double>(heads) / static_cast<double>(flips);
}

namespace detail {

inline void append_unique_sorted(std::vector<std::int64_t>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

// The most recently visited `cap` distinct values of a chronological list.
inline std::vector<std::int64_t> recent_distinct(
    const std::vector<std::int64_t>& list, std::size_t cap) {
  std::vector<std::int64_t> out;
  for (auto it = list.rbegin(); it != list.rend() && out.size() < cap; ++it)
    if (std::find(out.begin(), out.end(), *it) == out.end()) out.push_back(*it);
  return out;
}

// kDepth bounds template instantiation; the depth-1 call subsamples at
// gamma = 1/7, which caps its candidate list at 7 and ends the recursion.
template <int kDepth, CoinOracleLike O>
SearchResult screening_impl(O& oracle, std::int64_t n, double tau, double eps,
                            double delta, std::optional<double> gamma_top,
                            const ScreeningConfig& cfg, ScreeningProbe* probe) {
  SearchResult res;
  if (n == 2) {
    res.interval = 1;
    res.report.answer = 1;
    return res;
  }
  const std::uint64_t start = oracle.flips_used();
  const double lg_n = std::log2(static_cast<double>(n));
  const double eps_prime =
      eps * std::max(1.0 - std::cbrt(std::log(1.0 / delta) / std::log(static_cast<double>(n))),
                     2.0 / 3.0);
  double gamma_red = gamma_top ? *gamma_top
                               : cfg.gamma_reduction.value_or(1.0 / (3.0 * lg_n));
  gamma_red = std::min(gamma_red, 1.0 / 7.0);
  if (probe && kDepth == 0) probe->eps_prime = eps_prime;

  const ChannelParams ch = channel_params(tau, eps_prime);
  std::vector<std::int64_t> candidates =
      reduction_to_gamma(oracle, n, ch, delta / 3.0, gamma_red, cfg.c1, cfg.c2);
  const std::uint64_t after_learn = oracle.flips_used();
  res.report.add_stage("learner", after_learn - start);

  // The candidate scan and the padded subproblem both need ascending coins.
  append_unique_sorted(candidates);
  if (probe) {
    if (kDepth == 0)
      probe->candidates = candidates;
    else
      probe->recursion_candidates = candidates;
  }

  const double accuracy = (eps - eps_prime) / 2.0;
  const double threshold = tau - eps + accuracy;
  const auto scan_cap =
      static_cast<std::size_t>(std::floor(1.0 / cfg.gamma_recursive));

  if (candidates.size() > scan_cap) {
    if constexpr (kDepth == 0) {
      std::vector<std::int64_t> padded;
      padded.reserve(candidates.size() + 2);
      if (candidates.front() != 1) padded.push_back(1);
      padded.insert(padded.end(), candidates.begin(), candidates.end());
      if (candidates.back() != n) padded.push_back(n);
      if (probe) probe->recursion_map = padded;

      IndexedOracleView<O> sub(oracle, padded);
      const SearchResult inner =
          screening_impl<1>(sub, static_cast<std::int64_t>(padded.size()), tau,
                            eps_prime, delta / 3.0, cfg.gamma_recursive, cfg,
                            probe);
      const std::uint64_t after_rec = oracle.flips_used();
      res.report.add_stage("recursion", after_rec - after_learn);
      res.report.recursion_depth = 1 + inner.report.recursion_depth;
      res.report.scan_fallback = inner.report.scan_fallback;

      const auto i = static_cast<std::size_t>(inner.interval);  // 1-based
      const std::int64_t left_coin = padded[i - 1];
      const std::int64_t right_coin = padded[i];
      const double estimate = estimate_bias(oracle, left_coin + 1, accuracy,
                                            delta / 3.0, cfg.estimator_constant);
      if (probe)
        probe->estimates.push_back({kDepth, left_coin + 1, estimate, accuracy});
      res.report.add_stage("estimation", oracle.flips_used() - after_rec);
      res.interval = estimate > threshold ? left_coin : right_coin - 1;
      res.report.answer = res.interval;
      res.report.flips_used = oracle.flips_used() - start;
      return res;
    } else {
      throw std::logic_error("screening: candidate list exceeded 1/gamma at depth 1");
    }
  }

  // Scan the (at most 7) candidates in ascending order and return the first
  // whose right endpoint tests above the band floor.  All estimates failing
  // can only happen inside the failure mass; fall back to the last candidate
  // and flag the report.
  std::int64_t answer = candidates.back();
  bool found = false;
  for (const std::int64_t x : candidates) {
    const double estimate = estimate_bias(oracle, x + 1, accuracy, delta / 18.0,
                                          cfg.estimator_constant);
    if (probe) probe->estimates.push_back({kDepth, x + 1, estimate, accuracy});
    if (estimate > threshold) {
      answer = x;
      found = true;
      break;
    }
  }
  res.report.scan_fallback = !found;
  res.report.add_stage("estimation", oracle.flips_used() - after_learn);
  res.interval = answer;
  res.report.answer = answer;
  res.report.flips_used = oracle.flips_used() - start;
  return res;
}

}  // namespace detail

// The screening search: Bayesian learner at shrunken eps', gamma-quantile
// subsample of its transcript, then either a direct scan of the at most 7
// survivors or one recursive call on the padded survivor coins.  Succeeds
// with probability 1 - cfg.delta.
template <CoinOracleLike O>
SearchResult bayesian_screening_search(O& oracle, std::int64_t n, double tau,
                                       double eps, ScreeningConfig cfg = {},
                                       ScreeningProbe* probe = nullptr) {
  if (n < 2)
    throw std::invalid_argument("bayesian_screening_search: need n >= 2");
  if (!(eps > 0.0 && eps < std::min(tau, 1.0 - tau) / 2.0))
    throw std::invalid_argument(
        "bayesian_screening_search: need 0 < eps < min(tau,1-tau)/2");
  if (!(cfg.delta > 0.0 && cfg.delta < 0.5))
    throw std::invalid_argument("bayesian_screening_search: need 0 < delta < 1/2");
  if (cfg.budget_cap) oracle.restrict_budget(*cfg.budget_cap);
  return detail::screening_impl<0>(oracle, n, tau, eps, cfg.delta,
                                   cfg.gamma_top, cfg, probe);
}

// Expected-query wrapper: with probability delta - delta/lg n answers
// uniformly at random from zero flips, otherwise runs the full search with
// failure budget delta/lg n.  Overall failure probability stays below delta
// while the expected flip count drops by almost a (1 - delta) factor.
template <CoinOracleLike O, class Rng>
SearchResult silly_bayesian_screening_search(O& oracle, std::int64_t n,
                                             double tau, double eps,
                                             double delta, Rng& rng,
                                             ScreeningConfig cfg = {},
                                             ScreeningProbe* probe = nullptr) {
  if (n < 2)
    throw std::invalid_argument("silly_bayesian_screening_search: need n >= 2");
  if (!(delta > 0.0 && delta < 0.5))
    throw std::invalid_argument("silly_bayesian_screening_search: bad delta");
  const double lg_n = std::log2(static_cast<double>(n));
  const double skip_probability = delta - delta / lg_n;
  if (rng.uniform01() < skip_probability) {
    SearchResult res;
    res.interval =
        1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n - 1)));
    res.report.answer = res.interval;
    res.report.add_stage("zero_flip", 0);
    return res;
  }
  cfg.delta = delta / lg_n;
  return bayesian_screening_search(oracle, n, tau, eps, cfg, probe);
}

struct VariantConfig {
  // Share constants on the narrowing/estimation stage cores; frozen from the
  // pilot sweep (the narrow stage dominates the failure mass at small n).
  double narrow_share = 3.0;
  double estimate_share = 1.0;
  // Only the most recent distinct survivors feed the narrowing search.
  std::size_t survivor_cap = 7;
};

// The budgeted experiment variant: the learner updates with eps itself (not
// eps') at gamma = 1/ln^2 n, a small noisy binary search narrows the padded
// survivors to two finalists, and the rest of the budget estimates the bias
// between them.  Never exceeds `budget`; if the budget cannot cover the
// stage cores the report is flagged exhausted and the answer is best-effort.
template <CoinOracleLike O>
SearchResult experiment_variant_search(O& oracle, std::int64_t n, double tau,
                                       double eps, std::uint64_t budget,
                                       const VariantConfig& vcfg,
                                       ScreeningProbe* probe = nullptr) {
  if (n < 2)
    throw std::invalid_argument("experiment_variant_search: need n >= 2");
  if (budget < 1)
    throw std::invalid_argument("experiment_variant_search: need budget >= 1");
  SearchResult res;
  if (n == 2) {
    res.interval = 1;
    res.report.answer = 1;
    return res;
  }
  const std::uint64_t start = oracle.flips_used();
  const ChannelParams ch = channel_params(tau, eps);
  const double lg_n = std::log2(static_cast<double>(n));
  const double ln_n = std::log(static_cast<double>(n));
  const double gamma = std::min(1.0, 1.0 / (ln_n * ln_n));

  const auto core_learn = static_cast<std::uint64_t>(std::ceil(lg_n / ch.capacity));
  const auto core_narrow = static_cast<std::uint64_t>(std::ceil(
      vcfg.narrow_share * std::max(1.0, std::log2(lg_n)) / ch.capacity));
  const auto core_estimate = static_cast<std::uint64_t>(
      std::ceil(vcfg.estimate_share / ch.capacity));

  std::uint64_t b_learn = 0, b_narrow = 0, b_estimate = 0;
  if (budget >= core_learn + core_narrow + core_estimate) {
    const std::uint64_t rem = budget - core_learn - core_narrow - core_estimate;
    b_learn = core_learn + rem / 3;
    b_narrow = core_narrow + rem / 3;
    b_estimate = core_estimate + (rem - 2 * (rem / 3));
  } else {
    res.report.exhausted = true;
    b_learn = std::min(budget, core_learn);
    b_narrow = std::min(budget - b_learn, core_narrow);
    b_estimate = budget - b_learn - b_narrow;
  }

  // Stage 1: learner with the full-width update.  Keep the most recent
  // distinct survivors: post-convergence visits are the trustworthy ones.
  std::vector<std::int64_t> candidates;
  if (b_learn > 0) {
    const LearnTranscript t = bayes_learn(oracle, n, ch, b_learn);
    candidates = detail::recent_distinct(
        subsample_quantiles_raw(t.intervals, gamma), vcfg.survivor_cap);
    detail::append_unique_sorted(candidates);
  }
  const std::uint64_t after_learn = oracle.flips_used();
  res.report.add_stage("learner", after_learn - start);
  if (probe) probe->candidates = candidates;

  std::vector<std::int64_t> coins;
  coins.reserve(candidates.size() + 2);
  coins.push_back(1);
  for (const std::int64_t c : candidates)
    if (c != 1 && c != n) coins.push_back(c);
  coins.push_back(n);

  // Stage 2: narrow the padded survivors to the two finalists.
  const auto m = static_cast<std::int64_t>(coins.size());
  std::int64_t finalist = m - 1;  // 1-based interval inside `coins`
  if (m > 2) {
    const auto levels =
        static_cast<std::uint64_t>(std::ceil(std::log2(static_cast<double>(m))));
    if (b_narrow >= levels) {
      IndexedOracleView<O> sub(oracle, coins);
      const SearchResult narrowed = naive_nbs(sub, m, tau, eps, b_narrow);
      finalist = narrowed.interval;
    } else {
      res.report.exhausted = true;
    }
  } else {
    finalist = 1;
  }
  const std::uint64_t after_narrow = oracle.flips_used();
  res.report.add_stage("narrow", after_narrow - after_learn);

  const std::int64_t left_coin = coins[static_cast<std::size_t>(finalist - 1)];
  const std::int64_t right_coin = coins[static_cast<std::size_t>(finalist)];

  // Stage 3: all remaining budget estimates p_{left+1}; the eps/6 margin
  // plays the (eps - eps')/2 role with eps' at its 2/3 floor.
  std::int64_t answer = left_coin;
  if (b_estimate >= 1) {
    std::uint64_t heads = 0;
    for (std::uint64_t i = 0; i < b_estimate; ++i)
      heads += static_cast<std::uint64_t>(oracle.flip(left_coin + 1));
    const double estimate =
        static_cast<double>(heads) / static_cast<double>(b_estimate);
    const double threshold = tau - eps + eps / 6.0;
    answer = estimate > threshold ? left_coin : right_coin - 1;
    if (probe) probe->estimates.push_back({0, left_coin + 1, estimate, eps / 6.0});
  } else {
    res.report.exhausted = true;
  }
  res.report.add_stage("estimation", oracle.flips_used() - after_narrow);

  if (answer < 1) answer = 1;
  if (answer > n - 1) answer = n - 1;
  res.interval = answer;
  res.report.answer = answer;
  res.report.flips_used = oracle.flips_used() - start;
  return res;
}

template <CoinOracleLike O>
SearchResult experiment_variant_search(O& oracle, std::int64_t n, double tau,
                                       double eps, std::uint64_t budget,
                                       ScreeningProbe* probe = nullptr) {
  return experiment_variant_search(oracle, n, tau, eps, budget,
                                   VariantConfig{}, probe);
}

}  // namespace nbs
