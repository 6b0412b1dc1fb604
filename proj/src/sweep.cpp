#include "frohlich/sweep.hpp"

#include <omp.h>

#include <cmath>
#include <exception>
#include <limits>
#include <string>

#include "frohlich/distribution.hpp"
#include "frohlich/error.hpp"

namespace frohlich::sweep {

Axis parse_axis(std::string_view label) {
  if (label == "r" || label == "r_ghz") return Axis::r;
  if (label == "nbar") return Axis::nbar;
  if (label == "chi" || label == "chi_ghz") return Axis::chi;
  if (label == "D") return Axis::D;
  throw UsageError("unknown sweep axis '" + std::string(label) + "' (expected r|nbar|chi|D)");
}

std::string_view to_string(Axis a) noexcept {
  switch (a) {
    case Axis::r: return "r_ghz";
    case Axis::nbar: return "nbar";
    case Axis::chi: return "chi_ghz";
    case Axis::D: return "D";
  }
  return "unknown";
}

ModelParams with_axis(ModelParams p, Axis axis, double value) {
  switch (axis) {
    case Axis::r: p.r = value; break;
    case Axis::nbar:
      p.nbar = value;
      p.temperature_k.reset();
      break;
    case Axis::chi: p.chi = value; break;
    case Axis::D:
      if (value != std::floor(value)) throw UsageError("D sweep values must be integers");
      p.D = static_cast<int>(value);
      break;
  }
  p.validate();
  return p;
}

SweepRow evaluate(const ModelParams& p, const SweepOptions& opts) {
  const DerivedRates d = derive_rates(p);
  const auto s = distribution::statistics(distribution::steady_distribution(p), d);
  SweepRow row;
  row.n0_mean = s.mean;
  row.fraction = s.condensate_fraction;
  row.mandel_q = s.mandel_q;
  try {
    const auto lw = masterq::linewidth(p, opts.sound_speed_m_s, opts.linewidth_source);
    row.gamma0_full = lw.gamma_full;
    row.gamma0_approx = lw.gamma_approx;
    row.lifetime_ns = lw.lifetime_ns;
  } catch (const DomainError&) {
    row.gamma0_full = row.gamma0_approx = row.lifetime_ns =
        std::numeric_limits<double>::quiet_NaN();
  }
  return row;
}

std::vector<SweepRow> run(const ModelParams& base, Axis axis, std::span<const double> values,
                          const SweepOptions& opts) {
  if (values.empty()) throw UsageError("sweep value list is empty");
  // validate every point before any work starts
  std::vector<ModelParams> points;
  points.reserve(values.size());
  for (double v : values) points.push_back(with_axis(base, axis, v));

  std::vector<SweepRow> rows(values.size());
  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(values.size());
  const int threads = opts.jobs > 0 ? opts.jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads) if (threads != 1 && n > 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      rows[i] = evaluate(points[i], opts);
      rows[i].value = values[i];
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

}  // namespace frohlich::sweep
