#include "nbs/distributions.hpp"

#include <cmath>
#include <stdexcept>

#include "nbs/rng.hpp"

namespace nbs {

double DistributionSpec::tau() const {
  switch (kind) {
    case DistributionKind::kBiased:
      return 0.75;
    default:
      return 0.5;
  }
}

double DistributionSpec::eps() const { return 0.1; }

std::string DistributionSpec::name() const {
  switch (kind) {
    case DistributionKind::kStandard:
      return "standard";
    case DistributionKind::kBiased:
      return "biased";
    case DistributionKind::kLopsided:
      return "lopsided";
    case DistributionKind::kWide:
      return "wide";
    case DistributionKind::kNoiseless:
      return "noiseless";
  }
  return "?";
}

DistributionKind parse_distribution(const std::string& name) {
  if (name == "standard") return DistributionKind::kStandard;
  if (name == "biased") return DistributionKind::kBiased;
  if (name == "lopsided") return DistributionKind::kLopsided;
  if (name == "wide") return DistributionKind::kWide;
  if (name == "noiseless") return DistributionKind::kNoiseless;
  throw std::invalid_argument("unknown distribution: " + name);
}

std::int64_t wide_window_length(std::int64_t n) {
  return static_cast<std::int64_t>(
      std::ceil(10.0 * std::log(static_cast<double>(n))));
}

ProblemInstance make_instance(const DistributionSpec& spec, std::uint64_t seed) {
  if (spec.n < 2) throw std::invalid_argument("make_instance: need n >= 2");
  Xoshiro256pp rng(seed);
  const double tau = spec.tau();
  const double eps = spec.eps();
  const auto n = spec.n;
  switch (spec.kind) {
    case DistributionKind::kStandard:
    case DistributionKind::kBiased: {
      const auto cross =
          1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n - 1)));
      return ProblemInstance::step(n, tau, eps, cross, tau - eps, tau + eps);
    }
    case DistributionKind::kLopsided: {
      const auto cross =
          1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n - 1)));
      return ProblemInstance::step(n, tau, eps, cross, tau - 0.6 * eps, tau + eps);
    }
    case DistributionKind::kWide: {
      const std::int64_t window = wide_window_length(n);
      if (window > n)
        throw std::invalid_argument("make_instance: Wide window exceeds n");
      const auto max_start = static_cast<std::uint64_t>(n - window + 1);
      const auto win_start = static_cast<std::int64_t>(rng.below(max_start));
      return ProblemInstance::ramp(n, tau, eps, win_start, window, tau - eps,
                                   tau + eps);
    }
    case DistributionKind::kNoiseless: {
      const auto cross =
          1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n - 1)));
      return ProblemInstance::step(n, tau, eps, cross, 0.0, 1.0);
    }
  }
  throw std::logic_error("make_instance: unreachable");
}

}  // namespace nbs
