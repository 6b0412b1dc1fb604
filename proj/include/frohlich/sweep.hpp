#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "frohlich/masterq.hpp"
#include "frohlich/params.hpp"

namespace frohlich::sweep {

enum class Axis { r, nbar, chi, D };
Axis parse_axis(std::string_view label);
std::string_view to_string(Axis a) noexcept;

struct SweepRow {
  double value = 0.0;
  double n0_mean = 0.0;   ///< distribution mean
  double fraction = 0.0;
  double mandel_q = 0.0;
  double gamma0_full = 0.0;    ///< GHz; NaN when <n0> = 0
  double gamma0_approx = 0.0;
  double lifetime_ns = 0.0;
};

struct SweepOptions {
  int jobs = 0;  ///< worker threads; 0 uses the OpenMP default
  masterq::OccupationSource linewidth_source = masterq::OccupationSource::meanfield;
  double sound_speed_m_s = 1500.0;
};

/// Statistics and linewidth at one parameter point.
SweepRow evaluate(const ModelParams& p, const SweepOptions& opts = {});

ModelParams with_axis(ModelParams p, Axis axis, double value);

/// One row per value, in input order regardless of scheduling.
std::vector<SweepRow> run(const ModelParams& base, Axis axis, std::span<const double> values,
                          const SweepOptions& opts = {});

}  // namespace frohlich::sweep
