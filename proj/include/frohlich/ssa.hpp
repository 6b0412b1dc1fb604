#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "frohlich/params.hpp"

namespace frohlich::ssa {

struct JumpConfig {
  std::uint64_t seed = 1;
  int n_trajectories = 1;
  std::optional<double> t_burn_ns;  ///< default 20 / phi
  double t_sample_ns = 0.0;
  std::optional<double> stride_ns;  ///< default 1 / phi
  std::optional<int> mode_count_override;  ///< run the multimode chain with this D
  bool one_phonon = true;   ///< pump, absorption and dissipation channels
  bool two_phonon = true;   ///< redistribution channels
  std::optional<std::uint64_t> max_jumps;  ///< per trajectory

  void validate() const;
};

struct JumpCounts {
  std::uint64_t one_phonon = 0;
  std::uint64_t two_phonon = 0;
};

struct SSAResult {
  std::vector<std::uint64_t> histogram;  ///< counts of sampled n0
  std::vector<double> occupation_means;  ///< time-averaged <n_l>, l = 0..D
  std::vector<double> total_number_samples;
  std::vector<std::vector<std::int64_t>> n0_samples;  ///< per trajectory
  std::string rng_algorithm;
  std::uint64_t seed = 0;
  JumpCounts jumps;
  std::uint64_t conservation_violations = 0;
  std::size_t channel_count = 0;
  int modes = 1;

  std::uint64_t sample_count() const;
  std::vector<double> normalized_histogram() const;
};

/// Generator for trajectory `index`: mt19937_64 seeded with splitmix64(seed + index).
std::mt19937_64 trajectory_engine(std::uint64_t seed, std::uint64_t index);
inline constexpr const char* kRngLabel = "mt19937_64/splitmix64-substreams/u53";

/// Uniform in [0, 1) from the top 53 bits.
inline double uniform53(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Exact sampling of the single-mode birth-death chain (same rates as the
/// master-equation generator).
SSAResult simulate_single_mode(const ModelParams& p, const JumpConfig& cfg);

/// Exact sampling of all D+1 modes with one-phonon and pairwise two-phonon
/// channels under the flat spectrum.
SSAResult simulate_multimode(const ModelParams& p, const JumpConfig& cfg);

struct MandelEstimate {
  double mean = 0.0;
  double mandel_q = 0.0;
  double mean_se = 0.0;  ///< jackknife standard errors
  double q_se = 0.0;
  std::size_t samples = 0;
};

/// Jackknife over `blocks` contiguous blocks of the concatenated samples.
/// UsageError below 1000 samples.
MandelEstimate mandel_from_samples(std::span<const std::int64_t> samples, int blocks = 20);
MandelEstimate mandel_from_samples(const SSAResult& result, int blocks = 20);

}  // namespace frohlich::ssa
