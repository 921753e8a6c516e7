#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nbs/oracle.hpp"

namespace nbs {

// Launch failure, crash, or timeout of the external command; distinct from a
// clean nonzero exit, which is a legitimate tails outcome.
class CommandError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Runs an external command per flip.  Every occurrence of "{}" in the
// argument vector is replaced with the coin index; exit status 0 maps to
// outcome 1 and any other clean exit maps to 0 (bisect-style usage).
class CommandOracle : public OracleBase<CommandOracle> {
 public:
  struct Options {
    std::optional<std::string> working_directory;
    std::optional<std::int64_t> timeout_ms;
  };

  explicit CommandOracle(std::vector<std::string> argv_template,
                         Options options = {});

  int sample(std::int64_t coin);

 private:
  std::vector<std::string> argv_template_;
  Options options_;
};

}  // namespace nbs
