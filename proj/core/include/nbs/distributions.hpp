#pragma once

#include <cstdint>
#include <string>

#include "nbs/instance.hpp"

namespace nbs {

// The four experiment distributions, plus a noiseless debug kind
// (p in {0, 1}) for exercising harness plumbing.
enum class DistributionKind { kStandard, kBiased, kLopsided, kWide, kNoiseless };

struct DistributionSpec {
  DistributionKind kind = DistributionKind::kStandard;
  std::int64_t n = 0;

  double tau() const;
  double eps() const;
  std::string name() const;
};

DistributionKind parse_distribution(const std::string& name);

// Draws one instance: a uniformly placed crossing for the step kinds, or a
// uniformly placed ramp window of ceil(10 ln n) coins for Wide.
ProblemInstance make_instance(const DistributionSpec& spec, std::uint64_t seed);

// Window width used by the Wide kind.
std::int64_t wide_window_length(std::int64_t n);

}  // namespace nbs
