#pragma once

#include <cstdint>

#include "nbs/oracle.hpp"

namespace nbs {

struct SearchResult {
  std::int64_t interval = -1;
  RunReport report;
};

}  // namespace nbs
