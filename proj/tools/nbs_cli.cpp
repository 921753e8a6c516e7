// nbs: noisy binary search runner.
//
//   nbs simulate   one run of one algorithm on one drawn instance
//   nbs bench      campaign over algorithms x distributions x n -> CSV
//   nbs calibrate  budget calibration for one budgeted algorithm
//   nbs search     screening search against an external command oracle

#include <cinttypes>
#include <cstdio>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nbs/calibrate.hpp"
#include "nbs/campaign.hpp"
#include "nbs/command_oracle.hpp"
#include "nbs/screening.hpp"

namespace {

std::uint64_t pick_seed(std::optional<std::uint64_t> seed) {
  if (seed) return *seed;
  std::random_device rd;
  const std::uint64_t chosen =
      (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  std::printf("seed: %" PRIu64 " (chosen from system entropy)\n", chosen);
  return chosen;
}

nbs::DistributionSpec make_spec(const std::string& dist, std::int64_t n) {
  return nbs::DistributionSpec{nbs::parse_distribution(dist), n};
}

void print_report(const nbs::SearchResult& res, bool show_transcript) {
  std::printf("answer interval: %lld\n",
              static_cast<long long>(res.interval));
  std::printf("flips used:      %" PRIu64 "\n", res.report.flips_used);
  for (const auto& [stage, flips] : res.report.stage_flips)
    std::printf("  stage %-10s %" PRIu64 "\n", stage.c_str(), flips);
  if (res.report.recursion_depth > 0)
    std::printf("recursion depth: %d\n", res.report.recursion_depth);
  if (res.report.failed) std::printf("outcome:         FAILED (budget)\n");
  if (res.report.exhausted) std::printf("flag:            budget exhausted\n");
  if (res.report.scan_fallback) std::printf("flag:            scan fallback\n");
  if (show_transcript && res.report.transcript) {
    std::printf("transcript:");
    for (const std::int64_t j : *res.report.transcript)
      std::printf(" %lld", static_cast<long long>(j));
    std::printf("\n");
  }
}

std::vector<std::string> split_command(const std::string& cmd) {
  std::vector<std::string> out;
  std::istringstream in(cmd);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"noisy binary search library runner"};
  app.require_subcommand(1);
  app.allow_extras();

  // --- simulate ---
  auto* simulate = app.add_subcommand("simulate", "run one search once");
  std::string sim_algo = "screening";
  std::string sim_dist = "standard";
  std::int64_t sim_n = 1 << 13;
  std::optional<std::uint64_t> sim_budget;
  double sim_delta = 0.1;
  std::optional<std::uint64_t> sim_seed;
  bool sim_transcript = false;
  simulate->add_option("--algo", sim_algo,
                       "screening|silly|variant|naive|kk_mw|kk_backtracking");
  simulate->add_option("--dist", sim_dist,
                       "standard|biased|lopsided|wide|noiseless");
  simulate->add_option("--n", sim_n, "number of coins");
  simulate->add_option("--budget", sim_budget, "sample budget (budgeted algos)");
  simulate->add_option("--delta", sim_delta, "failure probability (native algos)");
  simulate->add_option("--seed", sim_seed, "campaign seed; omitted = entropy");
  simulate->add_flag("--transcript", sim_transcript, "print queried intervals");

  // --- bench ---
  auto* bench = app.add_subcommand("bench", "campaign -> CSV");
  std::vector<std::string> bn_algos{"screening"};
  std::vector<std::string> bn_dists{"standard"};
  std::vector<std::int64_t> bn_ns{1 << 13};
  std::vector<std::uint64_t> bn_budgets;
  std::uint64_t bn_trials = 100;
  std::optional<std::uint64_t> bn_seed;
  double bn_delta = 0.1;
  std::string bn_out = "campaign.csv";
  int bn_threads = 0;
  bench->add_option("--algo", bn_algos, "algorithms")->delimiter(',');
  bench->add_option("--dist", bn_dists, "distributions")->delimiter(',');
  bench->add_option("--n", bn_ns, "coin counts")->delimiter(',');
  bench
      ->add_option("--budget", bn_budgets,
                   "budgets; one value or one per --n entry")
      ->delimiter(',');
  bench->add_option("--trials", bn_trials, "trials per configuration");
  bench->add_option("--seed", bn_seed, "campaign seed; omitted = entropy");
  bench->add_option("--delta", bn_delta, "failure probability for native algos");
  bench->add_option("--out", bn_out, "output CSV path");
  bench->add_option("--threads", bn_threads, "worker threads (0 = auto)");

  // --- calibrate ---
  auto* calibrate = app.add_subcommand("calibrate", "budget calibration");
  std::string cal_algo = "naive";
  std::string cal_dist = "standard";
  std::int64_t cal_n = 1000;
  double cal_ratio = 1.05;
  std::optional<std::uint64_t> cal_seed;
  std::string cal_out;
  std::uint64_t cal_min_budget = 16;
  std::uint64_t cal_probe_trials = 120;
  bool cal_rates = false;
  calibrate->add_option("--algo", cal_algo, "budgeted algorithm");
  calibrate->add_option("--dist", cal_dist, "distribution");
  calibrate->add_option("--n", cal_n, "number of coins");
  calibrate->add_option("--grid-ratio", cal_ratio, "geometric grid step");
  calibrate->add_option("--seed", cal_seed, "seed; omitted = entropy");
  calibrate->add_option("--out", cal_out, "optional CSV path");
  calibrate->add_option("--min-budget", cal_min_budget, "pre-scan floor");
  calibrate->add_option("--probe-trials", cal_probe_trials,
                        "trials per pre-scan probe");
  calibrate->add_flag("--probe-rates", cal_rates,
                      "measure per-budget success rates (diagnostic)");

  // --- search ---
  auto* search = app.add_subcommand("search", "external-command oracle search");
  std::int64_t se_n = 0;
  double se_tau = 0.5, se_eps = 0.1, se_delta = 0.1;
  std::string se_cmd;
  std::vector<std::string> se_rest;
  std::optional<std::int64_t> se_timeout;
  std::optional<std::string> se_workdir;
  search->add_option("--n", se_n, "number of coins")->required();
  search->add_option("--tau", se_tau, "target threshold");
  search->add_option("--eps", se_eps, "half width");
  search->add_option("--delta", se_delta, "failure probability");
  search->add_option("--cmd", se_cmd,
                     "command template, space separated, {} = coin index");
  search->add_option("--timeout-ms", se_timeout, "per-invocation timeout");
  search->add_option("--workdir", se_workdir, "working directory");
  search->allow_extras();  // command template after --

  CLI11_PARSE(app, argc, argv);
  se_rest = search->remaining();
  if (se_rest.empty()) se_rest = app.remaining();

  try {
    if (*simulate) {
      const std::uint64_t seed = pick_seed(sim_seed);
      const nbs::Algorithm algo = nbs::parse_algorithm(sim_algo);
      const nbs::DistributionSpec spec = make_spec(sim_dist, sim_n);
      const nbs::ProblemInstance inst =
          nbs::make_instance(spec, nbs::derive_seed(seed, 0));
      nbs::SimulatedOracle oracle(inst, nbs::derive_seed(seed, 1));
      if (sim_budget) oracle.restrict_budget(*sim_budget);
      nbs::SearchResult res;
      switch (algo) {
        case nbs::Algorithm::kScreening: {
          nbs::ScreeningConfig cfg;
          cfg.delta = sim_delta;
          res = nbs::bayesian_screening_search(oracle, spec.n, spec.tau(),
                                               spec.eps(), cfg);
          break;
        }
        case nbs::Algorithm::kSilly: {
          nbs::Xoshiro256pp aux(nbs::derive_seed(seed, 2));
          res = nbs::silly_bayesian_screening_search(
              oracle, spec.n, spec.tau(), spec.eps(), sim_delta, aux);
          break;
        }
        case nbs::Algorithm::kVariant:
          if (!sim_budget) throw CLI::ValidationError("--budget required");
          res = nbs::experiment_variant_search(oracle, spec.n, spec.tau(),
                                               spec.eps(), *sim_budget);
          break;
        case nbs::Algorithm::kNaive:
          if (!sim_budget) throw CLI::ValidationError("--budget required");
          res = nbs::naive_nbs(oracle, spec.n, spec.tau(), spec.eps(),
                               *sim_budget);
          break;
        case nbs::Algorithm::kKkMw:
          if (!sim_budget) throw CLI::ValidationError("--budget required");
          res = nbs::kk_multiplicative_weights(oracle, spec.n, spec.tau(),
                                               spec.eps(), *sim_budget);
          break;
        case nbs::Algorithm::kKkBacktracking:
          if (!sim_budget) throw CLI::ValidationError("--budget required");
          res = nbs::kk_backtracking(oracle, spec.n, spec.tau(), spec.eps(),
                                     *sim_budget);
          break;
      }
      print_report(res, sim_transcript);
      if (res.interval >= 1 && res.interval < spec.n)
        std::printf("ground truth:    %s\n",
                    inst.is_good(res.interval, spec.eps()) ? "good" : "not good");
      std::printf(
          "expectation floor (delta=%g): %.1f flips\n", sim_delta,
          nbs::expectation_floor(static_cast<std::uint64_t>(spec.n), spec.tau(),
                                 spec.eps(), sim_delta));
      return res.report.failed ? 2 : 0;
    }

    if (*bench) {
      const std::uint64_t seed = pick_seed(bn_seed);
      if (!bn_budgets.empty() && bn_budgets.size() != 1 &&
          bn_budgets.size() != bn_ns.size())
        throw CLI::ValidationError(
            "--budget needs one value or one per --n entry");
      nbs::CampaignResult result;
      std::uint64_t config = 0;
      for (const std::string& algo_name : bn_algos) {
        const nbs::Algorithm algo = nbs::parse_algorithm(algo_name);
        for (const std::string& dist : bn_dists) {
          for (std::size_t ni = 0; ni < bn_ns.size(); ++ni) {
            nbs::CampaignOptions opt;
            opt.trials = bn_trials;
            opt.delta = bn_delta;
            opt.threads = bn_threads;
            opt.seed = nbs::derive_seed(seed, config++);
            if (nbs::algorithm_is_budgeted(algo)) {
              if (bn_budgets.empty())
                throw CLI::ValidationError("--budget required for " + algo_name);
              opt.budget = bn_budgets.size() == 1 ? bn_budgets[0]
                                                  : bn_budgets[ni];
            }
            const nbs::DistributionSpec spec = make_spec(dist, bn_ns[ni]);
            const nbs::CampaignRun run = nbs::run_campaign(algo, spec, opt);
            result.rows.push_back(run.row);
            std::printf("%s %s n=%lld: %" PRIu64 "/%" PRIu64
                        " ok, mean %.1f flips\n",
                        run.row.algorithm.c_str(), run.row.distribution.c_str(),
                        static_cast<long long>(run.row.n), run.row.successes,
                        run.row.trials, run.row.mean_flips);
          }
        }
      }
      nbs::emit_csv(result, bn_out);
      std::printf("wrote %s (%zu rows)\n", bn_out.c_str(), result.rows.size());
      return 0;
    }

    if (*calibrate) {
      const std::uint64_t seed = pick_seed(cal_seed);
      const nbs::Algorithm algo = nbs::parse_algorithm(cal_algo);
      if (!nbs::algorithm_is_budgeted(algo))
        throw CLI::ValidationError("calibrate needs a budgeted algorithm");
      const nbs::DistributionSpec spec = make_spec(cal_dist, cal_n);
      const nbs::TrialFn trial =
          nbs::make_trial_fn(algo, spec, 0.15, nbs::derive_seed(seed, 10));
      nbs::GridOptions gopt;
      gopt.ratio = cal_ratio;
      gopt.min_budget = cal_min_budget;
      gopt.probe_trials = cal_probe_trials;
      const auto grid =
          nbs::build_budget_grid(trial, nbs::derive_seed(seed, 11), gopt);
      std::printf("grid: %zu budgets in [%" PRIu64 ", %" PRIu64 "]\n",
                  grid.size(), grid.front(), grid.back());
      if (cal_rates) {
        const auto rates = nbs::measure_success_rates(
            trial, grid, 200, nbs::derive_seed(seed, 12));
        for (std::size_t i = 0; i < grid.size(); ++i)
          std::printf("  budget %-10" PRIu64 " success %.3f\n", grid[i],
                      rates[i]);
      }
      const nbs::Calibration cal =
          nbs::calibrate_budget(trial, grid, nbs::derive_seed(seed, 13));
      std::printf("calibrated budgets for %s on %s n=%lld:\n", cal_algo.c_str(),
                  cal_dist.c_str(), static_cast<long long>(cal_n));
      std::printf("  tau=0.8 (lower): %" PRIu64 "\n", cal.budget_low);
      std::printf("  tau=0.9 (upper): %" PRIu64 "\n", cal.budget_high);
      if (!cal_out.empty()) {
        std::FILE* f = std::fopen(cal_out.c_str(), "wb");
        if (!f) throw std::runtime_error("cannot open " + cal_out);
        std::fprintf(f,
                     "algorithm,distribution,n,grid_ratio,budget_low,"
                     "budget_high,grid_min,grid_max,grid_points,seed\n");
        std::fprintf(f,
                     "%s,%s,%lld,%g,%" PRIu64 ",%" PRIu64 ",%" PRIu64
                     ",%" PRIu64 ",%zu,%" PRIu64 "\n",
                     cal_algo.c_str(), cal_dist.c_str(),
                     static_cast<long long>(cal_n), cal_ratio, cal.budget_low,
                     cal.budget_high, grid.front(), grid.back(), grid.size(),
                     seed);
        std::fclose(f);
        std::printf("wrote %s\n", cal_out.c_str());
      }
      return 0;
    }

    if (*search) {
      std::vector<std::string> argv_template =
          se_rest.empty() ? split_command(se_cmd) : se_rest;
      if (argv_template.empty())
        throw CLI::ValidationError("search needs --cmd or trailing arguments");
      bool has_placeholder = false;
      for (const auto& a : argv_template)
        if (a.find("{}") != std::string::npos) has_placeholder = true;
      if (!has_placeholder) argv_template.push_back("{}");
      nbs::CommandOracle::Options copt;
      if (se_timeout) copt.timeout_ms = *se_timeout;
      if (se_workdir) copt.working_directory = *se_workdir;
      nbs::CommandOracle oracle(argv_template, copt);
      nbs::ScreeningConfig cfg;
      cfg.delta = se_delta;
      const nbs::SearchResult res =
          nbs::bayesian_screening_search(oracle, se_n, se_tau, se_eps, cfg);
      print_report(res, false);
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
