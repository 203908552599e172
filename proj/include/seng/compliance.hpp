#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace seng {

// Per-level target occupancy of base stations: levels[m-1][r] is the number
// of idle engineers that should stand at base r when m engineers are idle.
struct ComplianceTable {
  std::vector<std::vector<int>> levels;

  int num_levels() const { return static_cast<int>(levels.size()); }

  // Level sums must match the level index and adjacent levels may differ by
  // at most one arriving engineer: sum_r max(0, x[m][r]-x[m+1][r]) <= 1.
  void validate() const {
    for (int m = 0; m < num_levels(); ++m) {
      int sum = 0;
      for (int v : levels[m]) {
        if (v < 0) throw std::runtime_error("compliance table: negative entry");
        sum += v;
      }
      if (sum != m + 1)
        throw std::runtime_error("compliance table: level " + std::to_string(m + 1) +
                                 " does not place " + std::to_string(m + 1) +
                                 " engineers");
    }
    for (int m = 0; m + 1 < num_levels(); ++m) {
      int arrivals = 0;
      for (size_t r = 0; r < levels[m].size(); ++r)
        arrivals += std::max(0, levels[m][r] - levels[m + 1][r]);
      if (arrivals > 1)
        throw std::runtime_error(
            "compliance table: one-arrival bound violated between levels " +
            std::to_string(m + 1) + " and " + std::to_string(m + 2));
    }
  }
};

}  // namespace seng
