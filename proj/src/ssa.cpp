#include "frohlich/ssa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "frohlich/error.hpp"
#include "frohlich/masterq.hpp"
#include "frohlich/meanfield.hpp"

namespace frohlich::ssa {

void JumpConfig::validate() const {
  if (n_trajectories < 1) throw UsageError("n_trajectories must be >= 1");
  if (!(t_sample_ns > 0.0)) throw UsageError("t_sample must be > 0");
  if (t_burn_ns && !(*t_burn_ns >= 0.0)) throw UsageError("t_burn must be >= 0");
  if (stride_ns && !(*stride_ns > 0.0)) throw UsageError("sample stride must be > 0");
  if (mode_count_override && *mode_count_override < 1)
    throw UsageError("mode_count_override must be >= 1");
}

std::uint64_t SSAResult::sample_count() const {
  return std::accumulate(histogram.begin(), histogram.end(), std::uint64_t{0});
}

std::vector<double> SSAResult::normalized_histogram() const {
  const double total = static_cast<double>(sample_count());
  std::vector<double> out(histogram.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = total > 0.0 ? static_cast<double>(histogram[i]) / total : 0.0;
  return out;
}

std::mt19937_64 trajectory_engine(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + index + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return std::mt19937_64(z);
}

namespace {

struct Window {
  double t_start = 0.0;
  double t_end = 0.0;
  double stride = 0.0;
  std::size_t n_samples = 0;
};

Window make_window(const ModelParams& p, const JumpConfig& cfg) {
  Window w;
  w.t_start = cfg.t_burn_ns.value_or(20.0 / p.phi);
  w.t_end = w.t_start + cfg.t_sample_ns;
  w.stride = cfg.stride_ns.value_or(1.0 / p.phi);
  w.n_samples = static_cast<std::size_t>(std::ceil(cfg.t_sample_ns / w.stride - 1e-12));
  return w;
}

// Sampling and time averages of one trajectory.
struct Recorder {
  const Window& w;
  std::size_t next = 0;
  std::vector<std::int64_t> n0;
  std::vector<double> totals;
  std::vector<double> occupation_integral;
  double covered = 0.0;
  JumpCounts jumps;
  std::uint64_t violations = 0;

  Recorder(const Window& win, std::size_t modes) : w(win), occupation_integral(modes, 0.0) {}

  // the state `n` holds on [t, t + tau)
  void hold(double t, double tau, const std::vector<std::int64_t>& n, std::int64_t total) {
    const double t1 = std::min(t + tau, w.t_end);
    while (next < w.n_samples) {
      const double ts = w.t_start + static_cast<double>(next) * w.stride;
      if (ts >= t1) break;
      n0.push_back(n[0]);
      totals.push_back(static_cast<double>(total));
      ++next;
    }
    const double overlap = t1 - std::max(t, w.t_start);
    if (overlap > 0.0) {
      for (std::size_t l = 0; l < n.size(); ++l)
        occupation_integral[l] += static_cast<double>(n[l]) * overlap;
      covered += overlap;
    }
  }
};

double exponential(std::mt19937_64& eng, double rate) {
  return -std::log1p(-uniform53(eng)) / rate;
}

// picks an index with probability weight[i] / sum; falls back to the last positive weight
template <class Weight>
std::size_t pick(std::size_t count, double target, Weight&& weight) {
  std::size_t last = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double wi = weight(i);
    if (wi <= 0.0) continue;
    last = i;
    if (target < wi) return i;
    target -= wi;
  }
  return last;
}

SSAResult merge(std::vector<Recorder>& recs, const JumpConfig& cfg, std::size_t modes) {
  SSAResult res;
  res.rng_algorithm = kRngLabel;
  res.seed = cfg.seed;
  res.modes = static_cast<int>(modes);
  res.occupation_means.assign(modes, 0.0);
  double covered = 0.0;
  for (auto& r : recs) {
    for (std::int64_t v : r.n0) {
      if (static_cast<std::size_t>(v) >= res.histogram.size()) res.histogram.resize(v + 1, 0);
      ++res.histogram[static_cast<std::size_t>(v)];
    }
    res.total_number_samples.insert(res.total_number_samples.end(), r.totals.begin(),
                                    r.totals.end());
    for (std::size_t l = 0; l < modes; ++l) res.occupation_means[l] += r.occupation_integral[l];
    covered += r.covered;
    res.jumps.one_phonon += r.jumps.one_phonon;
    res.jumps.two_phonon += r.jumps.two_phonon;
    res.conservation_violations += r.violations;
    res.n0_samples.push_back(std::move(r.n0));
  }
  for (double& v : res.occupation_means) v = covered > 0.0 ? v / covered : 0.0;
  return res;
}

}  // namespace

SSAResult simulate_single_mode(const ModelParams& p, const JumpConfig& cfg) {
  cfg.validate();
  const auto gen = masterq::build_generator(p);
  const Window w = make_window(p, cfg);
  const auto start = static_cast<std::int64_t>(
      std::min<double>(std::round(meanfield::meanfield_steady_n0(p).n0_mean), gen.n_max));
  const std::uint64_t max_jumps = cfg.max_jumps.value_or(std::numeric_limits<std::uint64_t>::max());

  std::vector<Recorder> recs;
  recs.reserve(static_cast<std::size_t>(cfg.n_trajectories));
  for (int i = 0; i < cfg.n_trajectories; ++i) recs.emplace_back(w, 1);

#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < cfg.n_trajectories; ++i) {
    auto eng = trajectory_engine(cfg.seed, static_cast<std::uint64_t>(i));
    Recorder& rec = recs[static_cast<std::size_t>(i)];
    std::vector<std::int64_t> n{start};
    double t = 0.0;
    std::uint64_t count = 0;
    while (t < w.t_end && count < max_jumps) {
      const auto k = static_cast<std::size_t>(n[0]);
      const double up = gen.up[k], down = gen.down[k];
      const double R = up + down;
      const double tau = R > 0.0 ? exponential(eng, R) : std::numeric_limits<double>::infinity();
      rec.hold(t, tau, n, n[0]);
      t += tau;
      if (t >= w.t_end) break;
      n[0] += uniform53(eng) * R < up ? 1 : -1;
      ++rec.jumps.one_phonon;
      ++count;
    }
  }
  SSAResult res = merge(recs, cfg, 1);
  res.channel_count = 2;
  return res;
}

SSAResult simulate_multimode(const ModelParams& p_in, const JumpConfig& cfg) {
  cfg.validate();
  ModelParams p = p_in;
  if (cfg.mode_count_override) p.D = *cfg.mode_count_override;
  p.validate();
  if (p.spectrum.kind != SpectrumKind::flat)
    throw UsageError("multimode SSA supports the flat spectrum only");
  const std::size_t M = static_cast<std::size_t>(p.D) + 1;
  const Window w = make_window(p, cfg);
  const std::uint64_t max_jumps = cfg.max_jumps.value_or(std::numeric_limits<std::uint64_t>::max());

  // start near the mean-field state
  const DerivedRates d = derive_rates(p);
  const double n0_mf = std::min(meanfield::meanfield_steady_n0(p).n0_mean, d.N);
  std::vector<std::int64_t> initial(M, static_cast<std::int64_t>(std::round((d.N - n0_mf) / p.D)));
  initial[0] = static_cast<std::int64_t>(std::round(n0_mf));

  const double birth = p.r + p.phi * p.nbar;
  const double death = p.r + p.phi * (p.nbar + 1.0);
  const double k_down = p.chi * (p.nbar + 1.0);  // source above target
  const double k_up = p.chi * p.nbar;            // source below target

  std::vector<Recorder> recs;
  recs.reserve(static_cast<std::size_t>(cfg.n_trajectories));
  for (int i = 0; i < cfg.n_trajectories; ++i) recs.emplace_back(w, M);

#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < cfg.n_trajectories; ++i) {
    auto eng = trajectory_engine(cfg.seed, static_cast<std::uint64_t>(i));
    Recorder& rec = recs[static_cast<std::size_t>(i)];
    std::vector<std::int64_t> n = initial;
    std::int64_t total = std::accumulate(n.begin(), n.end(), std::int64_t{0});
    std::vector<double> source_rate(M), below(M);
    double t = 0.0;
    std::uint64_t count = 0;
    while (t < w.t_end && count < max_jumps) {
      const double B = cfg.one_phonon ? birth * static_cast<double>(total + static_cast<std::int64_t>(M)) : 0.0;
      const double Dd = cfg.one_phonon ? death * static_cast<double>(total) : 0.0;
      double T = 0.0;
      if (cfg.two_phonon) {
        // below[s] = sum_{t<s} (n_t + 1)
        double acc = 0.0;
        for (std::size_t s = 0; s < M; ++s) {
          below[s] = acc;
          acc += static_cast<double>(n[s] + 1);
        }
        for (std::size_t s = 0; s < M; ++s) {
          const double above = acc - below[s] - static_cast<double>(n[s] + 1);
          source_rate[s] = static_cast<double>(n[s]) * (k_down * below[s] + k_up * above);
          T += source_rate[s];
        }
      }
      const double R = B + Dd + T;
      const double tau = R > 0.0 ? exponential(eng, R) : std::numeric_limits<double>::infinity();
      rec.hold(t, tau, n, total);
      t += tau;
      if (t >= w.t_end) break;

      double u = uniform53(eng) * R;
      if (u < B) {
        const std::size_t l = pick(M, u / birth, [&](std::size_t k) { return double(n[k] + 1); });
        ++n[l];
        ++total;
        ++rec.jumps.one_phonon;
      } else if (u < B + Dd) {
        const std::size_t l = pick(M, (u - B) / death, [&](std::size_t k) { return double(n[k]); });
        --n[l];
        --total;
        ++rec.jumps.one_phonon;
      } else {
        u -= B + Dd;
        const std::size_t s = pick(M, u, [&](std::size_t k) { return source_rate[k]; });
        const double v = uniform53(eng) * (source_rate[s] / static_cast<double>(n[s]));
        const std::size_t tgt = pick(M, v, [&](std::size_t k) {
          if (k == s) return 0.0;
          return (k < s ? k_down : k_up) * static_cast<double>(n[k] + 1);
        });
        const std::int64_t before = total;
        --n[s];
        ++n[tgt];
        if (std::accumulate(n.begin(), n.end(), std::int64_t{0}) != before) ++rec.violations;
        ++rec.jumps.two_phonon;
      }
      ++count;
    }
  }
  SSAResult res = merge(recs, cfg, M);
  res.channel_count = (cfg.one_phonon ? 2 * M : 0) + (cfg.two_phonon ? M * (M - 1) : 0);
  return res;
}

MandelEstimate mandel_from_samples(std::span<const std::int64_t> samples, int blocks) {
  if (samples.size() < 1000) throw UsageError("Mandel estimate needs at least 1000 samples");
  if (blocks < 2) throw UsageError("jackknife needs at least 2 blocks");
  const std::size_t n = samples.size();
  const auto B = static_cast<std::size_t>(blocks);
  std::vector<double> s1(B, 0.0), s2(B, 0.0), cnt(B, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t b = i * B / n;
    const double x = static_cast<double>(samples[i]);
    s1[b] += x;
    s2[b] += x * x;
    cnt[b] += 1.0;
  }
  const double S1 = std::accumulate(s1.begin(), s1.end(), 0.0);
  const double S2 = std::accumulate(s2.begin(), s2.end(), 0.0);
  const double C = static_cast<double>(n);
  auto q_of = [](double m1, double m2, double c) {
    const double mean = m1 / c;
    const double var = m2 / c - mean * mean;
    return std::pair{mean, mean > 0.0 ? var / mean - 1.0 : 0.0};
  };
  MandelEstimate est;
  est.samples = n;
  std::tie(est.mean, est.mandel_q) = q_of(S1, S2, C);
  std::vector<double> jm(B), jq(B);
  for (std::size_t b = 0; b < B; ++b)
    std::tie(jm[b], jq[b]) = q_of(S1 - s1[b], S2 - s2[b], C - cnt[b]);
  auto jackknife_se = [&](const std::vector<double>& v) {
    const double bar = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(B);
    double ss = 0.0;
    for (double x : v) ss += (x - bar) * (x - bar);
    return std::sqrt((static_cast<double>(B) - 1.0) / static_cast<double>(B) * ss);
  };
  est.mean_se = jackknife_se(jm);
  est.q_se = jackknife_se(jq);
  return est;
}

MandelEstimate mandel_from_samples(const SSAResult& result, int blocks) {
  std::vector<std::int64_t> all;
  for (const auto& tr : result.n0_samples) all.insert(all.end(), tr.begin(), tr.end());
  return mandel_from_samples(all, blocks);
}

}  // namespace frohlich::ssa
