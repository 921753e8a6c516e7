#pragma once

#include <cstdint>
#include <vector>

#include "nbs/channel.hpp"

// Product-form Bayes reference for the learner.  Hypothesis a = "the
// crossing lies in interval a"; coins at or left of a are tau - eps, coins
// right of it are tau + eps, and the fractional query inside the boundary
// interval mixes the two by its split fraction.  The posterior is rebuilt
// from the raw likelihood product at every step, so this route shares no
// arithmetic with the incremental d-factor updates it checks.
class BayesReference {
 public:
  BayesReference(std::int64_t n_intervals, const nbs::ChannelParams& ch)
      : ch_(ch),
        likelihood_(static_cast<std::size_t>(n_intervals), 1.0),
        posterior_(static_cast<std::size_t>(n_intervals),
                   1.0 / static_cast<double>(n_intervals)) {}

  std::int64_t size() const {
    return static_cast<std::int64_t>(posterior_.size());
  }

  const std::vector<double>& posterior() const { return posterior_; }

  // Chooses the interval exactly as the learner's selection rule does,
  // from this reference's own posterior.
  std::int64_t select_interval() const {
    double s = 0.0;
    for (std::int64_t i = 1; i < size(); ++i) {
      s += posterior_[static_cast<std::size_t>(i - 1)];
      if (s >= ch_.q) return i;
    }
    return size();
  }

  void observe(std::int64_t j, int outcome) {
    double before = 0.0;
    for (std::int64_t i = 1; i < j; ++i)
      before += posterior_[static_cast<std::size_t>(i - 1)];
    const double wj = posterior_[static_cast<std::size_t>(j - 1)];
    const double kappa = (ch_.q - before) / wj;

    const double lik_left = outcome == 1 ? ch_.tau + ch_.eps
                                         : 1.0 - ch_.tau - ch_.eps;
    const double lik_right = outcome == 1 ? ch_.tau - ch_.eps
                                          : 1.0 - ch_.tau + ch_.eps;
    for (std::int64_t a = 1; a <= size(); ++a) {
      double lik;
      if (a < j)
        lik = lik_left;
      else if (a > j)
        lik = lik_right;
      else
        lik = kappa * lik_left + (1.0 - kappa) * lik_right;
      likelihood_[static_cast<std::size_t>(a - 1)] *= lik;
    }
    double total = 0.0;
    for (const double l : likelihood_) total += l;
    for (std::size_t a = 0; a < posterior_.size(); ++a)
      posterior_[a] = likelihood_[a] / total;
  }

 private:
  nbs::ChannelParams ch_;
  std::vector<double> likelihood_;  // prod of per-step likelihoods, uniform prior
  std::vector<double> posterior_;
};
