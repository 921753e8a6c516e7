#include "nbs/campaign.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "nbs/baselines.hpp"
#include "nbs/command_oracle.hpp"
#include "nbs/rng.hpp"
#include "nbs/screening.hpp"

namespace nbs {

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kScreening:
      return "screening";
    case Algorithm::kSilly:
      return "silly";
    case Algorithm::kVariant:
      return "variant";
    case Algorithm::kNaive:
      return "naive";
    case Algorithm::kKkMw:
      return "kk_mw";
    case Algorithm::kKkBacktracking:
      return "kk_backtracking";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "screening") return Algorithm::kScreening;
  if (name == "silly") return Algorithm::kSilly;
  if (name == "variant") return Algorithm::kVariant;
  if (name == "naive") return Algorithm::kNaive;
  if (name == "kk_mw") return Algorithm::kKkMw;
  if (name == "kk_backtracking") return Algorithm::kKkBacktracking;
  throw std::invalid_argument("unknown algorithm: " + name);
}

bool algorithm_is_budgeted(Algorithm a) {
  switch (a) {
    case Algorithm::kScreening:
    case Algorithm::kSilly:
      return false;
    default:
      return true;
  }
}

TrialOutcome run_algorithm_trial(Algorithm algo, const DistributionSpec& spec,
                                 std::optional<std::uint64_t> budget,
                                 double delta, std::uint64_t instance_seed,
                                 std::uint64_t oracle_seed,
                                 std::uint64_t aux_seed) {
  if (algorithm_is_budgeted(algo) && !budget)
    throw std::invalid_argument("run_algorithm_trial: " + algorithm_name(algo) +
                                " needs a budget");
  const ProblemInstance instance = make_instance(spec, instance_seed);
  SimulatedOracle oracle(instance, oracle_seed);
  if (budget) oracle.restrict_budget(*budget);

  TrialOutcome out;
  try {
    SearchResult res;
    switch (algo) {
      case Algorithm::kScreening: {
        ScreeningConfig cfg;
        cfg.delta = delta;
        res = bayesian_screening_search(oracle, spec.n, spec.tau(), spec.eps(),
                                        cfg);
        break;
      }
      case Algorithm::kSilly: {
        Xoshiro256pp aux(aux_seed);
        res = silly_bayesian_screening_search(oracle, spec.n, spec.tau(),
                                              spec.eps(), delta, aux);
        break;
      }
      case Algorithm::kVariant:
        res = experiment_variant_search(oracle, spec.n, spec.tau(), spec.eps(),
                                        *budget);
        break;
      case Algorithm::kNaive:
        res = naive_nbs(oracle, spec.n, spec.tau(), spec.eps(), *budget);
        break;
      case Algorithm::kKkMw:
        res = kk_multiplicative_weights(oracle, spec.n, spec.tau(), spec.eps(),
                                        *budget);
        break;
      case Algorithm::kKkBacktracking:
        res = kk_backtracking(oracle, spec.n, spec.tau(), spec.eps(), *budget);
        break;
    }
    out.flips = oracle.flips_used();
    out.success = !res.report.failed && res.interval >= 1 &&
                  res.interval <= spec.n - 1 &&
                  instance.is_good(res.interval, spec.eps());
  } catch (const BudgetExhausted&) {
    out.flips = oracle.flips_used();
    out.success = false;
  } catch (const CommandError&) {
    out.flips = oracle.flips_used();
    out.success = false;
  } catch (const std::invalid_argument&) {
    out.flips = oracle.flips_used();
    out.success = false;
  }
  return out;
}

CampaignRun run_campaign(Algorithm algo, const DistributionSpec& spec,
                         const CampaignOptions& options) {
  if (options.trials < 1)
    throw std::invalid_argument("run_campaign: need at least one trial");
  CampaignRun run;
  run.trials.resize(options.trials);

  const auto worker = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t t = begin; t < end; ++t) {
      run.trials[t] = run_algorithm_trial(
          algo, spec, options.budget, options.delta,
          derive_seed(options.seed, 3 * t), derive_seed(options.seed, 3 * t + 1),
          derive_seed(options.seed, 3 * t + 2));
    }
  };

  unsigned threads = options.threads > 0
                         ? static_cast<unsigned>(options.threads)
                         : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads,
                               static_cast<unsigned>(options.trials));
  if (threads <= 1) {
    worker(0, options.trials);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::uint64_t chunk = (options.trials + threads - 1) / threads;
    for (unsigned k = 0; k < threads; ++k) {
      const std::uint64_t begin = k * chunk;
      const std::uint64_t end = std::min<std::uint64_t>(begin + chunk,
                                                        options.trials);
      if (begin >= end) break;
      pool.emplace_back(worker, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  std::vector<std::uint64_t> flips;
  flips.reserve(options.trials);
  std::uint64_t successes = 0;
  for (const TrialOutcome& t : run.trials) {
    flips.push_back(t.flips);
    if (t.success) ++successes;
  }
  std::sort(flips.begin(), flips.end());
  double total = 0.0;
  for (const std::uint64_t f : flips) total += static_cast<double>(f);
  const std::size_t mid = flips.size() / 2;
  const double median =
      flips.size() % 2 == 1
          ? static_cast<double>(flips[mid])
          : 0.5 * (static_cast<double>(flips[mid - 1]) +
                   static_cast<double>(flips[mid]));

  run.row.algorithm = algorithm_name(algo);
  run.row.distribution = spec.name();
  run.row.n = spec.n;
  run.row.tau = spec.tau();
  run.row.eps = spec.eps();
  run.row.budget = options.budget.value_or(0);
  run.row.trials = options.trials;
  run.row.successes = successes;
  run.row.mean_flips = total / static_cast<double>(flips.size());
  run.row.median_flips = median;
  run.row.max_flips = flips.back();
  run.row.seed = options.seed;
  return run;
}

std::string csv_string(const CampaignResult& result) {
  std::string out =
      "algorithm,distribution,n,tau,eps,budget,trials,successes,"
      "mean_flips,median_flips,max_flips,seed\n";
  char buf[512];
  for (const CampaignRow& r : result.rows) {
    std::snprintf(buf, sizeof(buf),
                  "%s,%s,%lld,%g,%g,%llu,%llu,%llu,%.4f,%.1f,%llu,%llu\n",
                  r.algorithm.c_str(), r.distribution.c_str(),
                  static_cast<long long>(r.n), r.tau, r.eps,
                  static_cast<unsigned long long>(r.budget),
                  static_cast<unsigned long long>(r.trials),
                  static_cast<unsigned long long>(r.successes), r.mean_flips,
                  r.median_flips,
                  static_cast<unsigned long long>(r.max_flips),
                  static_cast<unsigned long long>(r.seed));
    out += buf;
  }
  return out;
}

void emit_csv(const CampaignResult& result, const std::string& path) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("emit_csv: cannot open " + path);
  file << csv_string(result);
  if (!file) throw std::runtime_error("emit_csv: write failed for " + path);
}

}  // namespace nbs
