#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nbs/distributions.hpp"

namespace nbs {

enum class Algorithm {
  kScreening,       // bayesian_screening_search, native failure budget delta
  kSilly,           // zero-flip wrapper around the screening search
  kVariant,         // budgeted experiment variant
  kNaive,           // binary search with repetition
  kKkMw,            // multiplicative weights baseline
  kKkBacktracking,  // backtracking baseline
};

std::string algorithm_name(Algorithm a);
Algorithm parse_algorithm(const std::string& name);
bool algorithm_is_budgeted(Algorithm a);

struct TrialOutcome {
  bool success = false;
  std::uint64_t flips = 0;
};

// One aggregate row of a campaign, in CSV column order.
struct CampaignRow {
  std::string algorithm;
  std::string distribution;
  std::int64_t n = 0;
  double tau = 0.0;
  double eps = 0.0;
  std::uint64_t budget = 0;  // 0 for the natively delta-driven algorithms
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double mean_flips = 0.0;
  double median_flips = 0.0;
  std::uint64_t max_flips = 0;
  std::uint64_t seed = 0;
};

struct CampaignResult {
  std::vector<CampaignRow> rows;
};

struct CampaignRun {
  CampaignRow row;
  std::vector<TrialOutcome> trials;
};

// Runs one algorithm once against one freshly drawn instance; every source
// of randomness is derived from the three seeds, so a trial is a pure
// function of them.  Per-trial budget/parameter errors and budget overruns
// count as failures.
TrialOutcome run_algorithm_trial(Algorithm algo, const DistributionSpec& spec,
                                 std::optional<std::uint64_t> budget,
                                 double delta, std::uint64_t instance_seed,
                                 std::uint64_t oracle_seed,
                                 std::uint64_t aux_seed);

struct CampaignOptions {
  std::optional<std::uint64_t> budget;  // required for budgeted algorithms
  double delta = 0.1;
  std::uint64_t trials = 100;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency
};

// `trials` independent instances, each run once; success is judged against
// ground truth at the distribution's eps.  Trial i uses streams derived from
// (seed, i), so reruns are bit-identical regardless of the thread count.
CampaignRun run_campaign(Algorithm algo, const DistributionSpec& spec,
                         const CampaignOptions& options);

std::string csv_string(const CampaignResult& result);
void emit_csv(const CampaignResult& result, const std::string& path);

}  // namespace nbs
