#include "nbs/oracle.hpp"

#include <cmath>

#include "doctest.h"
#include "nbs/command_oracle.hpp"

using namespace nbs;

TEST_SUITE("oracle") {

TEST_CASE("instance profiles and goodness") {
  const auto inst =
      ProblemInstance::from_values(0.5, 0.1, {0.4, 0.6});
  CHECK(inst.is_good(1, 0.1));  // straddles tau

  const auto low = ProblemInstance::from_values(0.5, 0.1, {0.1, 0.2});
  CHECK_FALSE(low.is_good(1, 0.1));  // entirely below tau - eps

  const auto near = ProblemInstance::from_values(0.5, 0.1, {0.4, 0.45});
  CHECK(near.is_good(1, 0.1));  // p2 = 0.45 in (0.4, 0.6)

  CHECK_THROWS_AS(near.is_good(0, 0.1), std::out_of_range);
  CHECK_THROWS_AS(near.is_good(2, 0.1), std::out_of_range);
  CHECK_THROWS_AS(
      ProblemInstance::from_values(0.5, 0.1, {0.6, 0.4}),
      std::invalid_argument);

  // virtual sentinels
  CHECK(near.p(0) == 0.0);
  CHECK(near.p(3) == 1.0);

  const auto stepped = ProblemInstance::step(10, 0.5, 0.1, 4, 0.4, 0.6);
  CHECK(stepped.p(4) == 0.4);
  CHECK(stepped.p(5) == 0.6);
  CHECK(stepped.count_good(0.1) == 1);

  const auto ramped = ProblemInstance::ramp(10, 0.5, 0.1, 2, 5, 0.4, 0.6);
  CHECK(ramped.p(2) == 0.4);
  CHECK(ramped.p(3) == 0.4);           // first window coin
  CHECK(ramped.p(5) == doctest::Approx(0.5));
  CHECK(ramped.p(7) == 0.6);           // last window coin
  CHECK(ramped.p(8) == 0.6);
  for (std::int64_t i = 1; i < 10; ++i)
    CHECK(ramped.p(i) <= ramped.p(i + 1));
}

TEST_CASE("deterministic coins") {
  const auto inst = ProblemInstance::from_values(0.5, 0.1, {0.0, 1.0});
  SimulatedOracle oracle(inst, 7);
  for (int k = 0; k < 50; ++k) {
    CHECK(oracle.flip(1) == 0);
    CHECK(oracle.flip(2) == 1);
  }
  CHECK(oracle.flips_used() == 100);
  CHECK_THROWS_AS(oracle.flip(0), std::out_of_range);
  CHECK_THROWS_AS(oracle.flip(3), std::out_of_range);
}

TEST_CASE("bernoulli concentration at fixed seed") {
  const auto inst = ProblemInstance::from_values(0.5, 0.1, {0.6, 0.6});
  SimulatedOracle oracle(inst, 123456);
  const int flips = 100000;
  std::int64_t heads = 0;
  for (int k = 0; k < flips; ++k) heads += oracle.flip(1);
  const double mean = static_cast<double>(heads) / flips;
  const double slack = 3.0 * std::sqrt(0.24 / flips);
  CHECK(std::fabs(mean - 0.6) <= slack);
}

TEST_CASE("same seed, same outcome sequence") {
  const auto inst = ProblemInstance::from_values(0.5, 0.1, {0.3, 0.7});
  SimulatedOracle a(inst, 99), b(inst, 99);
  for (int k = 0; k < 1000; ++k) {
    const std::int64_t coin = 1 + (k % 2);
    CHECK(a.flip(coin) == b.flip(coin));
  }
}

TEST_CASE("budget cap raises and accounts exactly") {
  const auto inst = ProblemInstance::from_values(0.5, 0.1, {0.5, 0.5});
  SimulatedOracle oracle(inst, 5);
  oracle.restrict_budget(10);
  for (int k = 0; k < 10; ++k) oracle.flip(1);
  CHECK(oracle.flips_used() == 10);
  CHECK_THROWS_AS(oracle.flip(1), BudgetExhausted);
  CHECK(oracle.flips_used() == 10);
  // tightening only
  oracle.clear_budget_cap();
  oracle.restrict_budget(100);
  oracle.restrict_budget(5);
  CHECK(*oracle.budget_cap() == 15);
  oracle.restrict_budget(50);
  CHECK(*oracle.budget_cap() == 15);
}

TEST_CASE("function oracle and indexed view share accounting") {
  int calls = 0;
  FunctionOracle fn([&](std::int64_t coin) {
    ++calls;
    return coin >= 5 ? 1 : 0;
  });
  const std::vector<std::int64_t> map = {2, 5, 9};
  IndexedOracleView view(fn, map);
  CHECK(view.flip(1) == 0);
  CHECK(view.flip(2) == 1);
  CHECK(view.flip(3) == 1);
  CHECK(fn.flips_used() == 3);
  CHECK(view.flips_used() == 3);
  CHECK(calls == 3);
  CHECK_THROWS_AS(view.flip(0), std::out_of_range);
  CHECK_THROWS_AS(view.flip(4), std::out_of_range);
}

TEST_CASE("command oracle maps exit status to outcomes") {
  CommandOracle oracle({"/bin/sh", "-c", "test \"$1\" -gt 3", "sh", "{}"});
  CHECK(oracle.flip(5) == 1);
  CHECK(oracle.flip(3) == 0);
  CHECK(oracle.flip(4) == 1);
  CHECK(oracle.flips_used() == 3);
}

TEST_CASE("command oracle infrastructure failures are not outcomes") {
  CommandOracle missing({"/nonexistent/binary-xyz", "{}"});
  CHECK_THROWS_AS(missing.flip(1), CommandError);

  CommandOracle::Options opt;
  opt.timeout_ms = 150;
  CommandOracle slow({"/bin/sh", "-c", "sleep 5"}, opt);
  CHECK_THROWS_AS(slow.flip(1), CommandError);
}

TEST_CASE("command oracle working directory") {
  CommandOracle::Options opt;
  opt.working_directory = "/tmp";
  CommandOracle oracle({"/bin/sh", "-c", "test \"$(pwd)\" = /tmp"}, opt);
  CHECK(oracle.flip(1) == 1);
}

}  // TEST_SUITE
