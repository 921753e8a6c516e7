#pragma once

#include <concepts>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nbs/instance.hpp"
#include "nbs/rng.hpp"

namespace nbs {

// Raised when a flip would exceed the oracle's budget cap.
class BudgetExhausted : public std::runtime_error {
 public:
  explicit BudgetExhausted(std::uint64_t used)
      : std::runtime_error("coin flip budget exhausted"), flips_used_(used) {}
  std::uint64_t flips_used() const { return flips_used_; }

 private:
  std::uint64_t flips_used_;
};

template <typename T>
concept CoinOracleLike = requires(T o, const T co, std::int64_t i, std::uint64_t b) {
  { o.flip(i) } -> std::convertible_to<int>;
  { co.flips_used() } -> std::convertible_to<std::uint64_t>;
  { o.restrict_budget(b) };
};

// Counting and budget-cap plumbing shared by every backend.  Each flip
// increments the counter by exactly one; a flip past the cap throws
// BudgetExhausted before touching the backend.
template <class Derived>
class OracleBase {
 public:
  int flip(std::int64_t coin) {
    if (cap_ && used_ >= *cap_) throw BudgetExhausted(used_);
    const int y = static_cast<Derived&>(*this).sample(coin);
    ++used_;
    return y;
  }

  std::uint64_t flips_used() const { return used_; }
  std::optional<std::uint64_t> budget_cap() const { return cap_; }

  // Caps total flips at flips_used() + budget, never loosening an existing
  // cap.  Budgeted algorithms call this on entry so overruns surface as
  // BudgetExhausted no matter how they miscount.
  void restrict_budget(std::uint64_t budget) {
    const std::uint64_t want = used_ + budget;
    if (!cap_ || want < *cap_) cap_ = want;
  }

  void clear_budget_cap() { cap_.reset(); }

 private:
  std::uint64_t used_ = 0;
  std::optional<std::uint64_t> cap_;
};

// Bernoulli draws against a simulated instance.
class SimulatedOracle : public OracleBase<SimulatedOracle> {
 public:
  SimulatedOracle(ProblemInstance instance, std::uint64_t seed)
      : instance_(std::move(instance)), rng_(seed), seed_(seed) {}

  int sample(std::int64_t coin) {
    if (coin < 1 || coin > instance_.n())
      throw std::out_of_range("SimulatedOracle: coin index out of range");
    return rng_.bernoulli(instance_.p(coin)) ? 1 : 0;
  }

  const ProblemInstance& instance() const { return instance_; }
  std::uint64_t seed() const { return seed_; }

 private:
  ProblemInstance instance_;
  Xoshiro256pp rng_;
  std::uint64_t seed_;
};

// Arbitrary callback backend; the budget-calibration meta-procedure uses it
// with "one flip = one full algorithm trial".
class FunctionOracle : public OracleBase<FunctionOracle> {
 public:
  explicit FunctionOracle(std::function<int(std::int64_t)> fn)
      : fn_(std::move(fn)) {}

  int sample(std::int64_t coin) { return fn_(coin); }

 private:
  std::function<int(std::int64_t)> fn_;
};

// View presenting coins {base[map[0]], base[map[1]], ...} as coins 1..m of a
// subproblem.  Flips (and the budget cap) are accounted on the underlying
// oracle, so a recursive search spends from the same purse.
template <CoinOracleLike O>
class IndexedOracleView {
 public:
  IndexedOracleView(O& base, std::span<const std::int64_t> map)
      : base_(base), map_(map) {}

  int flip(std::int64_t coin) {
    if (coin < 1 || coin > static_cast<std::int64_t>(map_.size()))
      throw std::out_of_range("IndexedOracleView: coin index out of range");
    return base_.flip(map_[static_cast<std::size_t>(coin - 1)]);
  }

  std::uint64_t flips_used() const { return base_.flips_used(); }
  void restrict_budget(std::uint64_t budget) { base_.restrict_budget(budget); }

 private:
  O& base_;
  std::span<const std::int64_t> map_;
};

// Outcome of one search run: the returned interval, the sample accounting
// per stage, and optionally the transcript of queried intervals.
struct RunReport {
  std::int64_t answer = -1;  // interval index; meaningless if failed
  bool failed = false;       // explicit failure outcome (budget overrun)
  bool exhausted = false;    // best-effort answer after running out of budget
  bool scan_fallback = false;  // no candidate passed its bias test
  int recursion_depth = 0;
  std::uint64_t flips_used = 0;
  std::vector<std::pair<std::string, std::uint64_t>> stage_flips;
  std::optional<std::vector<std::int64_t>> transcript;

  void add_stage(std::string name, std::uint64_t flips) {
    stage_flips.emplace_back(std::move(name), flips);
  }

  std::uint64_t stage_total() const {
    std::uint64_t total = 0;
    for (const auto& [name, flips] : stage_flips) total += flips;
    return total;
  }
};

}  // namespace nbs
