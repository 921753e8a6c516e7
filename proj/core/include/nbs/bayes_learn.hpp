#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nbs/channel.hpp"
#include "nbs/oracle.hpp"
#include "nbs/posterior.hpp"

namespace nbs {

// Transcript of one learner run: the chosen intervals (the list L), the
// observed outcome bits, and the final posterior.
struct LearnTranscript {
  std::vector<std::int64_t> intervals;
  std::vector<std::uint8_t> outcomes;
  Posterior posterior;
};

// Budget ran out mid-run; carries whatever transcript was produced.
class LearnBudgetExhausted : public BudgetExhausted {
 public:
  LearnBudgetExhausted(std::uint64_t used, LearnTranscript partial_transcript)
      : BudgetExhausted(used), partial(std::move(partial_transcript)) {}
  LearnTranscript partial;
};

// Iteration count sufficient for a gamma fraction of the chosen intervals to
// be good with probability 1 - delta:
//   ceil((1 + 7 gamma) / capacity *
//        (lg n + c1 sqrt(lg n lg(1/delta)) + c2 lg(1/delta)))
// c1 and c2 absorb the analysis constants; they default to 2 and are frozen
// after pilot calibration.
inline std::uint64_t bayes_learn_iterations(std::uint64_t n, double delta,
                                            double gamma, double capacity,
                                            double c1 = 2.0, double c2 = 2.0) {
  if (n < 2) throw std::invalid_argument("bayes_learn_iterations: need n >= 2");
  if (!(gamma > 0.0 && gamma <= 1.0 / 7.0))
    throw std::invalid_argument("bayes_learn_iterations: need 0 < gamma <= 1/7");
  if (!(delta > 0.0 && delta <= 1.0))
    throw std::invalid_argument("bayes_learn_iterations: need 0 < delta <= 1");
  if (!(capacity > 0.0))
    throw std::invalid_argument("bayes_learn_iterations: capacity must be > 0");
  if (c1 < 0.0 || c2 < 0.0)
    throw std::invalid_argument("bayes_learn_iterations: constants must be >= 0");
  const double lg_n = std::log2(static_cast<double>(n));
  const double lg_inv_delta = std::log2(1.0 / delta);
  const double core =
      lg_n + c1 * std::sqrt(lg_n * lg_inv_delta) + c2 * lg_inv_delta;
  return static_cast<std::uint64_t>(
      std::ceil((1.0 + 7.0 * gamma) / capacity * core));
}

// The core Bayesian learner: `steps` rounds of quantile selection, coin
// rounding, flipping, and the three-part posterior update.  Flips exactly
// `steps` coins; on budget exhaustion throws LearnBudgetExhausted with the
// partial transcript attached.
template <CoinOracleLike O>
LearnTranscript bayes_learn(O& oracle, std::int64_t n, const ChannelParams& ch,
                            std::uint64_t steps) {
  if (n < 2) throw std::invalid_argument("bayes_learn: need n >= 2 coins");
  LearnTranscript out{{}, {}, Posterior(n - 1)};
  out.intervals.reserve(steps);
  out.outcomes.reserve(steps);
  for (std::uint64_t t = 0; t < steps; ++t) {
    const double q = std::min(ch.q, out.posterior.total());
    const std::int64_t j = out.posterior.interval_at_quantile(q);
    const std::int64_t x = out.posterior.round_to_coin(j, q);
    out.intervals.push_back(j);
    int y = 0;
    try {
      y = oracle.flip(x);
    } catch (const BudgetExhausted& e) {
      out.intervals.pop_back();
      throw LearnBudgetExhausted(e.flips_used(), std::move(out));
    }
    out.outcomes.push_back(static_cast<std::uint8_t>(y));
    out.posterior.apply_update(j, y, ch, q);
  }
  return out;
}

template <CoinOracleLike O>
LearnTranscript bayes_learn(O& oracle, std::int64_t n, double tau, double eps,
                            std::uint64_t steps) {
  return bayes_learn(oracle, n, channel_params(tau, eps), steps);
}

}  // namespace nbs
