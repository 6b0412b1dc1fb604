#pragma once

#include <span>
#include <vector>

#include "frohlich/error.hpp"

namespace frohlich {

/// Sampled trajectory of observables. Columns that an operation does not
/// produce stay empty.
struct TimeSeries {
  std::vector<double> t_ns;
  std::vector<double> n0;                  ///< mean lowest-mode occupation
  std::vector<double> total;               ///< total phonon number
  std::vector<std::vector<double>> modes;  ///< per sample, occupations of modes 1..D
  std::vector<double> coherence;           ///< total coherence magnitude

  std::size_t size() const { return t_ns.size(); }
};

/// Output grids start at t >= 0 and increase strictly.
inline void check_time_grid(std::span<const double> t_grid) {
  if (t_grid.empty()) throw UsageError("time grid is empty");
  if (t_grid.front() < 0.0) throw UsageError("time grid must start at t >= 0");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1])) throw UsageError("time grid must be strictly increasing");
}

}  // namespace frohlich
