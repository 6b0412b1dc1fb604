#include "frohlich/cli/run.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

#include "frohlich/cli/config.hpp"
#include "frohlich/cli/output.hpp"
#include "frohlich/distribution.hpp"
#include "frohlich/feasibility.hpp"
#include "frohlich/masterq.hpp"
#include "frohlich/meanfield.hpp"
#include "frohlich/spectra.hpp"
#include "frohlich/ssa.hpp"
#include "frohlich/sweep.hpp"

#ifndef FROHLICH_VERSION
#define FROHLICH_VERSION "dev"
#endif

namespace frohlich::cli {

namespace fs = std::filesystem;

int exit_code(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::usage: return 2;
    case ErrorCategory::domain: return 3;
    case ErrorCategory::config: return 4;
    case ErrorCategory::missing_parameter: return 5;
    case ErrorCategory::range: return 6;
    case ErrorCategory::io: return 7;
  }
  return 1;
}

namespace {

// String-valued subcommand options, kept in declaration order so the manifest
// can replay them verbatim.
class Options {
 public:
  void add(CLI::App* app, const std::string& name, std::string fallback, const std::string& help) {
    order_.push_back(name);
    auto& slot = values_[name];
    slot = std::move(fallback);
    app->add_option("--" + name, slot, help)->capture_default_str();
  }

  const std::string& str(const std::string& name) const { return values_.at(name); }
  bool empty(const std::string& name) const { return values_.at(name).empty(); }

  double num(const std::string& name) const {
    try {
      return parse_double(name, str(name));
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
  }
  long long integer(const std::string& name) const {
    try {
      return parse_integer(name, str(name));
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
  }
  bool flag(const std::string& name) const {
    const auto& v = str(name);
    if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "off" || v == "no") return false;
    throw UsageError("--" + name + " expects true|false, got '" + v + "'");
  }

  json to_json() const {
    json j = json::object();
    for (const auto& k : order_) j[k] = values_.at(k);
    return j;
  }

 private:
  std::vector<std::string> order_;
  std::map<std::string, std::string> values_;
};

struct Context {
  std::string subcommand;
  KeyValues resolved;
  std::optional<ModelParams> params;
  const Options* options = nullptr;
  std::uint64_t seed = 1;
  int jobs = 0;
  std::string format = "csv";
  fs::path out_dir;
  std::vector<std::string> outputs;
  json summary = json::object();
  std::vector<std::string> notes;

  const ModelParams& p() const { return *params; }

  void emit_table(const std::string& stem, const Table& t) {
    if (format == "json") {
      write_file(out_dir, stem + ".json", t.to_json().dump(2) + "\n");
      outputs.push_back(stem + ".json");
    } else {
      write_file(out_dir, stem + ".csv", t.to_csv());
      outputs.push_back(stem + ".csv");
    }
  }
  void emit_json(const std::string& name, const json& j) {
    write_file(out_dir, name, j.dump(2) + "\n");
    outputs.push_back(name);
  }
};

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json params_json(const KeyValues& kv) {
  json j = json::object();
  for (std::string_view key : kParamKeys) {
    const auto it = kv.find(std::string(key));
    if (it == kv.end()) continue;
    if (key == "spectrum_kind")
      j[it->first] = it->second;
    else if (key == "D")
      j[it->first] = parse_integer(key, it->second);
    else
      j[it->first] = parse_double(key, it->second);
  }
  return j;
}

void note_spectrum(Context& ctx) {
  if (ctx.params && ctx.p().spectrum.kind == SpectrumKind::linear)
    ctx.notes.push_back(
        "linear spectrum: evenly spaced mode frequencies between f0_thz and fmax_thz are a "
        "constructed input, not taken from measured spectra");
}

std::vector<double> linspace(double a, double b, long long n) {
  if (n < 2) throw UsageError("need at least 2 samples");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / (n - 1);
  return v;
}

// ---- subcommands ----------------------------------------------------------

void cmd_steady(Context& ctx) {
  const auto& p = ctx.p();
  const DerivedRates d = derive_rates(p);
  const auto dist = distribution::steady_distribution(p);
  const auto s = distribution::statistics(dist, d);
  Table t{{"n0", "P"}, {}};
  t.rows.reserve(dist.probs.size());
  for (std::size_t n = 0; n < dist.probs.size(); ++n)
    t.rows.push_back({static_cast<double>(n), dist.probs[n]});
  ctx.emit_table("distribution", t);

  const auto mf = meanfield::meanfield_steady_n0(p);
  json j;
  j["mean"] = number(s.mean);
  j["second_moment"] = number(s.second_moment);
  j["variance"] = number(s.variance);
  j["mandel_q"] = number(s.mandel_q);
  j["fraction"] = number(s.condensate_fraction);
  j["n_cr"] = number(s.n_cr);
  j["peak"] = number(s.peak);
  j["provenance"] = std::string(distribution::to_string(dist.provenance));
  j["n_max"] = dist.n_max;
  j["tail_mass_bound"] = number(dist.tail_mass_bound);
  j["N"] = number(d.N);
  j["rc_ghz"] = number(d.rc);
  j["meanfield"] = {{"n0", number(mf.n0_mean)},
                    {"fraction", number(mf.condensate_fraction)},
                    {"branch", std::string(meanfield::to_string(mf.branch))}};
  if (d.alpha > d.beta) {
    const auto a = distribution::asymptotic_statistics(p);
    j["asymptotic"] = {{"mean", number(a.mean)}, {"mandel_q", number(a.mandel_q)},
                       {"eta", number(a.eta)}};
  } else {
    j["asymptotic"] = nullptr;
  }
  ctx.emit_json("stats.json", j);
  ctx.summary = j;
}

void cmd_evolve(Context& ctx) {
  const auto& p = ctx.p();
  const auto& o = *ctx.options;
  const double t_end = o.empty("t-end-ns") ? 10.0 / p.phi : o.num("t-end-ns");
  if (!(t_end > 0.0)) throw UsageError("--t-end-ns must be > 0");
  const auto grid = linspace(0.0, t_end, o.integer("samples"));
  const std::string kind = o.str("kind");
  json j;
  j["kind"] = kind;
  if (kind == "multimode") {
    const bool keep = o.flag("keep-modes");
    const auto ts =
        meanfield::evolve_multimode(p, meanfield::thermal_state(p), grid, keep);
    Table t{{"t_ns", "n0", "N"}, {}};
    if (keep)
      for (int l = 1; l <= p.D; ++l) t.columns.push_back("n_" + std::to_string(l));
    for (std::size_t i = 0; i < ts.size(); ++i) {
      std::vector<double> row{ts.t_ns[i], ts.n0[i], ts.total[i]};
      if (keep) row.insert(row.end(), ts.modes[i].begin(), ts.modes[i].end());
      t.rows.push_back(std::move(row));
    }
    ctx.emit_table("series", t);
    j["final_n0"] = number(ts.n0.back());
    j["final_N"] = number(ts.total.back());
  } else if (kind == "total") {
    const auto ts = meanfield::total_number_evolution(p, 0.0, grid);
    Table t{{"t_ns", "N"}, {}};
    for (std::size_t i = 0; i < ts.size(); ++i) t.rows.push_back({ts.t_ns[i], ts.total[i]});
    ctx.emit_table("series", t);
    j["final_N"] = number(ts.total.back());
  } else if (kind == "population") {
    const auto gen = masterq::build_generator(p);
    std::vector<double> P0(gen.size(), 0.0);
    P0[0] = 1.0;
    masterq::PopulationOptions po;
    po.integrator = masterq::parse_integrator(o.str("integrator"));
    po.trbdf2_substeps = static_cast<int>(o.integer("substeps"));
    const auto tr = masterq::evolve_population(p, gen, P0, grid, po);
    Table t{{"t_ns", "n0", "n0_sq", "prob_sum", "moment_residual"}, {}};
    for (std::size_t i = 0; i < tr.series.size(); ++i)
      t.rows.push_back({tr.series.t_ns[i], tr.series.n0[i], tr.second_moment[i],
                        tr.probability_sum[i], tr.moment_residual[i]});
    ctx.emit_table("series", t);
    j["n_max"] = gen.n_max;
    j["final_n0"] = number(tr.series.n0.back());
    j["max_norm_error"] = number(tr.max_norm_error);
    j["max_boundary_mass"] = number(tr.max_boundary_mass);
    if (tr.max_boundary_mass > 1e-9)
      ctx.notes.push_back("boundary probability exceeded 1e-9; raise the truncation");
  } else {
    throw UsageError("unknown --kind '" + kind + "' (expected multimode|total|population)");
  }
  ctx.emit_json("evolve.json", j);
  ctx.summary = j;
}

std::vector<double> sweep_values(const Options& o) {
  std::vector<double> values;
  if (!o.empty("values")) {
    std::stringstream ss(o.str("values"));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        values.push_back(parse_double("values", item));
      } catch (const ConfigError& e) {
        throw UsageError(e.what());
      }
    }
  } else if (!o.empty("range")) {
    std::stringstream ss(o.str("range"));
    std::string a, b, c;
    if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c))
      throw UsageError("--range expects lo:hi:count");
    try {
      values = linspace(parse_double("range", a), parse_double("range", b),
                        parse_integer("range", c));
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
  }
  return values;
}

void cmd_sweep(Context& ctx) {
  const auto& o = *ctx.options;
  const auto axis = sweep::parse_axis(o.str("axis"));
  const auto values = sweep_values(o);
  sweep::SweepOptions so;
  so.jobs = ctx.jobs;
  so.linewidth_source = masterq::parse_occupation_source(o.str("n0-source"));
  const auto rows = sweep::run(ctx.p(), axis, values, so);
  Table t{{std::string(sweep::to_string(axis)), "n0", "fraction", "Q", "gamma0_ghz",
           "gamma0_approx_ghz", "lifetime_ns"},
          {}};
  for (const auto& r : rows)
    t.rows.push_back({r.value, r.n0_mean, r.fraction, r.mandel_q, r.gamma0_full, r.gamma0_approx,
                      r.lifetime_ns});
  ctx.emit_table("sweep", t);
  ctx.summary = {{"rows", rows.size()}, {"axis", std::string(sweep::to_string(axis))}};
}

void cmd_coherence(Context& ctx) {
  const auto& p = ctx.p();
  const auto& o = *ctx.options;
  const auto source = masterq::parse_occupation_source(o.str("n0-source"));
  const auto lw = masterq::linewidth(p, o.num("sound-speed"), source);
  const auto grid = masterq::coherence_window(p, static_cast<int>(o.integer("samples")));
  const auto res = masterq::evolve_coherence(p, masterq::detailed_balance_coherence(p), grid,
                                             static_cast<int>(o.integer("substeps")));
  Table t{{"t_ns", "total_coherence_magnitude"}, {}};
  for (std::size_t i = 0; i < res.series.size(); ++i)
    t.rows.push_back({res.series.t_ns[i], res.series.coherence[i]});
  ctx.emit_table("coherence", t);
  json j;
  j["gamma0_full_ghz"] = number(lw.gamma_full);
  j["gamma0_approx_ghz"] = number(lw.gamma_approx);
  j["gamma_fit_ghz"] = number(res.gamma_fit);
  j["gamma_distribution_mean_ghz"] = number(res.gamma_reference);
  j["lifetime_ns"] = number(lw.lifetime_ns);
  j["ell_c_m"] = number(lw.coherence_length_m);
  j["n0"] = number(lw.n0_used);
  j["n0_source"] = std::string(masterq::to_string(source));
  j["frame"] = "rotating at omega_0; magnitudes only";
  ctx.emit_json("coherence.json", j);
  ctx.summary = j;
}

void cmd_spectrum(Context& ctx) {
  const auto& p = ctx.p();
  const auto& o = *ctx.options;
  spectra::LineOptions lo;
  lo.occupations = spectra::parse_occupation_model(o.str("occupations"));
  const auto lines = spectra::build_lines(p, lo);
  const auto grid = spectra::adaptive_grid(lines, static_cast<int>(o.integer("background-points")),
                                           static_cast<int>(o.integer("line-points")));
  spectra::SampleOptions so;
  so.scale = o.num("scale");
  so.frequency_factor = o.flag("frequency-factor");
  const auto spec = spectra::sample_spectrum(lines, grid, so);
  Table t{{"f_thz", "intensity"}, {}};
  for (std::size_t i = 0; i < grid.size(); ++i)
    t.rows.push_back({spec.frequencies_thz[i], spec.intensities[i]});
  ctx.emit_table("spectrum", t);
  json j;
  j["occupation_model"] = std::string(spectra::to_string(lo.occupations));
  json arr = json::array();
  for (const auto& l : lines)
    arr.push_back({{"center_thz", number(l.center_thz)},
                   {"half_width_ghz", number(l.half_width_ghz)},
                   {"weight", number(l.weight)}});
  j["lines"] = std::move(arr);
  ctx.emit_json("lines.json", j);
  ctx.summary = {{"lines", lines.size()},
                 {"condensate_half_width_ghz", number(lines.front().half_width_ghz)},
                 {"condensate_weight", number(lines.front().weight)}};
}

void cmd_ssa(Context& ctx) {
  const auto& p = ctx.p();
  const auto& o = *ctx.options;
  ssa::JumpConfig cfg;
  cfg.seed = ctx.seed;
  cfg.n_trajectories = static_cast<int>(o.integer("trajectories"));
  if (!o.empty("t-burn-ns")) cfg.t_burn_ns = o.num("t-burn-ns");
  if (!o.empty("stride-ns")) cfg.stride_ns = o.num("stride-ns");
  if (!o.empty("modes")) cfg.mode_count_override = static_cast<int>(o.integer("modes"));
  if (!o.empty("max-jumps")) cfg.max_jumps = static_cast<std::uint64_t>(o.integer("max-jumps"));
  cfg.one_phonon = o.flag("one-phonon");
  cfg.two_phonon = o.flag("two-phonon");
  const double stride = cfg.stride_ns.value_or(1.0 / p.phi);
  cfg.t_sample_ns = o.empty("t-sample-ns")
                        ? o.num("samples") * stride / std::max(cfg.n_trajectories, 1)
                        : o.num("t-sample-ns");
  const std::string mode = o.str("mode");
  ssa::SSAResult res;
  if (mode == "single")
    res = ssa::simulate_single_mode(p, cfg);
  else if (mode == "multimode")
    res = ssa::simulate_multimode(p, cfg);
  else
    throw UsageError("unknown --mode '" + mode + "' (expected single|multimode)");

  Table t{{"n0", "count"}, {}};
  for (std::size_t n = 0; n < res.histogram.size(); ++n)
    t.rows.push_back({static_cast<double>(n), static_cast<double>(res.histogram[n])});
  ctx.emit_table("histogram", t);

  json j;
  j["mode"] = mode;
  j["samples"] = res.sample_count();
  if (res.sample_count() >= 1000) {
    const auto m = ssa::mandel_from_samples(res);
    j["mean"] = number(m.mean);
    j["mean_se"] = number(m.mean_se);
    j["mandel_q"] = number(m.mandel_q);
    j["mandel_q_se"] = number(m.q_se);
  } else {
    j["mean"] = j["mean_se"] = j["mandel_q"] = j["mandel_q_se"] = nullptr;
  }
  j["occupation_total"] =
      number(std::accumulate(res.occupation_means.begin(), res.occupation_means.end(), 0.0));
  ModelParams scaled = p;
  if (cfg.mode_count_override) scaled.D = *cfg.mode_count_override;
  const auto analytic = distribution::steady_distribution(scaled);
  j["analytic"] = {
      {"N", number(derive_rates(scaled).N)},
      {"mandel_q", number(distribution::statistics(analytic, derive_rates(scaled)).mandel_q)},
      {"tv_distance", number(distribution::total_variation(res.normalized_histogram(),
                                                           analytic.probs))}};
  j["rng"] = res.rng_algorithm;
  j["seed"] = res.seed;
  j["trajectories"] = cfg.n_trajectories;
  j["jumps"] = {{"one_phonon", res.jumps.one_phonon}, {"two_phonon", res.jumps.two_phonon}};
  j["channel_count"] = res.channel_count;
  j["conservation_violations"] = res.conservation_violations;
  ctx.emit_json("ssa.json", j);
  ctx.summary = j;
}

void cmd_feasibility(Context& ctx) {
  const auto& o = *ctx.options;
  auto need = [&](const char* key) {
    const auto it = ctx.resolved.find(key);
    if (it == ctx.resolved.end())
      throw MissingParameterError(std::string("missing parameter '") + key + "'");
    return parse_double(key, it->second);
  };
  feasibility::Input in;
  in.r_ghz = need("r_ghz");
  in.frequency_thz = need("f0_thz");
  in.wavelength_um = o.num("wavelength-um");
  in.cross_section_cm2 = o.num("cross-section-cm2");
  const auto rep = feasibility::estimate(in);
  json j;
  j["per_molecule_power_pw"] = number(rep.per_molecule_power_pw);
  j["spot_area_cm2"] = number(rep.spot_area_cm2);
  j["photon_count"] = number(rep.photon_count);
  j["laser_power_w"] = number(rep.laser_power_w);
  ctx.emit_json("feasibility.json", j);
  ctx.summary = j;
}

// ---- driver ---------------------------------------------------------------

struct Command {
  CLI::App* app = nullptr;
  Options options;
  std::function<void(Context&)> fn;
  bool needs_params = true;
};

void write_error_json(std::ostream& err, std::string_view category, const std::string& message) {
  json j;
  j["error"] = {{"category", category}, {"message", message}};
  err << j.dump() << "\n";
}

std::vector<std::string> replay_args(const fs::path& manifest_path,
                                     const std::vector<std::string>& passthrough) {
  std::ifstream in(manifest_path);
  if (!in) throw IoError("cannot read manifest '" + manifest_path.string() + "'");
  json m;
  try {
    m = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("manifest is not valid JSON: " + std::string(e.what()));
  }
  if (m.value("status", "") != "ok")
    throw ConfigError("manifest does not record a successful run");
  try {
    std::vector<std::string> args{m.at("subcommand").get<std::string>()};
    for (const auto& [k, v] : m.at("parameters").items()) {
      std::string text;
      if (v.is_string()) {
        text = v.get<std::string>();
      } else if (v.is_number_integer()) {
        text = std::to_string(v.get<long long>());
      } else {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
        text = buf;
      }
      args.push_back("--" + k + "=" + text);
    }
    for (const auto& [k, v] : m.at("options").items())
      if (!v.get<std::string>().empty()) args.push_back("--" + k + "=" + v.get<std::string>());
    args.push_back("--seed=" + std::to_string(m.at("seed").get<std::uint64_t>()));
    args.push_back("--jobs=" + std::to_string(m.at("jobs").get<int>()));
    args.push_back("--format=" + m.at("format").get<std::string>());
    args.insert(args.end(), passthrough.begin(), passthrough.end());
    return args;
  } catch (const json::exception& e) {
    throw ConfigError("manifest is missing fields: " + std::string(e.what()));
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Froehlich condensate kinetics: statistics, dynamics, coherence and spectra",
               "frohlich"};
  app.fallthrough();
  app.set_version_flag("--version", FROHLICH_VERSION);

  std::string config_path, preset_name, from_manifest, format = "csv";
  fs::path out_dir = ".";
  std::uint64_t seed = 1;
  int jobs = 0;
  app.add_option("--config", config_path, "key=value parameter file");
  app.add_option("--preset", preset_name, "named parameter set (bsa-280, bsa-34, lysozyme)");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--format", format, "table format: csv|json")->capture_default_str();
  app.add_option("--seed", seed, "master seed for stochastic runs")->capture_default_str();
  app.add_option("--jobs", jobs, "worker threads (0 = OpenMP default)")->capture_default_str();
  app.add_option("--from-manifest", from_manifest, "replay the run recorded in a manifest");
  std::map<std::string, std::string> flag_values;
  for (std::string_view key : kParamKeys)
    app.add_option("--" + std::string(key), flag_values[std::string(key)],
                   "parameter override");

  std::map<std::string, Command> commands;
  auto add = [&](const std::string& name, const std::string& help,
                 std::function<void(Context&)> fn) -> Command& {
    auto& c = commands[name];
    c.app = app.add_subcommand(name, help);
    c.fn = std::move(fn);
    return c;
  };

  add("steady", "stationary phonon distribution and statistics", cmd_steady);

  auto& evolve = add("evolve", "time evolution", cmd_evolve);
  evolve.options.add(evolve.app, "kind", "multimode", "multimode|total|population");
  evolve.options.add(evolve.app, "t-end-ns", "", "end time (default 10/phi)");
  evolve.options.add(evolve.app, "samples", "201", "output samples");
  evolve.options.add(evolve.app, "keep-modes", "false", "emit n_1..n_D columns");
  evolve.options.add(evolve.app, "integrator", "trbdf2", "population integrator: trbdf2|dopri5");
  evolve.options.add(evolve.app, "substeps", "20", "trbdf2 steps per output interval");

  auto& sw = add("sweep", "statistics and linewidth along one parameter axis", cmd_sweep);
  sw.options.add(sw.app, "axis", "r", "r|nbar|chi|D");
  sw.options.add(sw.app, "values", "", "comma-separated values");
  sw.options.add(sw.app, "range", "", "lo:hi:count");
  sw.options.add(sw.app, "n0-source", "meanfield", "occupation used in gamma0: meanfield|distribution");

  auto& coh = add("coherence", "coherence decay and linewidth", cmd_coherence);
  coh.options.add(coh.app, "samples", "200", "samples over [0, 2/gamma]");
  coh.options.add(coh.app, "substeps", "8", "TR-BDF2 steps per sample interval");
  coh.options.add(coh.app, "n0-source", "meanfield", "meanfield|distribution");
  coh.options.add(coh.app, "sound-speed", "1500", "sound speed in m/s");

  auto& spec = add("spectrum", "fluorescence spectrum (linear spectrum only)", cmd_spectrum);
  spec.options.add(spec.app, "occupations", "flat", "line weights from flat|boltzmann kinetics");
  spec.options.add(spec.app, "background-points", "2000", "uniform grid points");
  spec.options.add(spec.app, "line-points", "401", "points within +-12 widths of each line");
  spec.options.add(spec.app, "scale", "1", "overall prefactor");
  spec.options.add(spec.app, "frequency-factor", "true", "multiply by f / f_lowest");

  auto& ss = add("ssa", "stochastic simulation", cmd_ssa);
  ss.options.add(ss.app, "mode", "single", "single|multimode");
  ss.options.add(ss.app, "trajectories", "4", "independent trajectories");
  ss.options.add(ss.app, "samples", "100000", "total samples when --t-sample-ns is unset");
  ss.options.add(ss.app, "t-sample-ns", "", "sampling window per trajectory");
  ss.options.add(ss.app, "t-burn-ns", "", "burn-in (default 20/phi)");
  ss.options.add(ss.app, "stride-ns", "", "sampling stride (default 1/phi)");
  ss.options.add(ss.app, "modes", "", "multimode: run with this D instead");
  ss.options.add(ss.app, "max-jumps", "", "per-trajectory jump limit");
  ss.options.add(ss.app, "one-phonon", "true", "enable pump/absorption/dissipation");
  ss.options.add(ss.app, "two-phonon", "true", "enable redistribution");

  auto& fe = add("feasibility", "pump power estimate", cmd_feasibility);
  fe.needs_params = false;
  fe.options.add(fe.app, "wavelength-um", "400", "pump wavelength");
  fe.options.add(fe.app, "cross-section-cm2", "1e-15", "absorption cross-section");

  app.require_subcommand(0, 1);

  Context ctx;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return 0;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return 0;
    } catch (const CLI::CallForVersion&) {
      out << FROHLICH_VERSION << "\n";
      return 0;
    } catch (const CLI::ParseError& e) {
      throw UsageError(e.what());
    }

    if (!from_manifest.empty()) {
      std::vector<std::string> pass{"--out=" + out_dir.string()};
      return run(replay_args(from_manifest, pass), out, err);
    }

    const auto chosen = std::find_if(commands.begin(), commands.end(),
                                     [](const auto& kv) { return kv.second.app->parsed(); });
    if (chosen == commands.end())
      throw UsageError("no subcommand given (steady, evolve, sweep, coherence, spectrum, ssa, feasibility)");
    if (format != "csv" && format != "json") throw UsageError("--format must be csv or json");
    if (jobs < 0) throw UsageError("--jobs must be >= 0");
    if (jobs > 0) omp_set_num_threads(jobs);

    ctx.subcommand = chosen->first;
    ctx.options = &chosen->second.options;
    ctx.seed = seed;
    ctx.jobs = jobs;
    ctx.format = format;
    ctx.out_dir = out_dir;

    KeyValues preset_layer, config_layer, flag_layer;
    if (!preset_name.empty()) {
      try {
        preset_layer = preset_values(preset_name);
      } catch (const UsageError& e) {
        throw ConfigError(e.what());
      }
    }
    if (!config_path.empty()) config_layer = read_config_file(config_path);
    for (const auto& [k, v] : flag_values)
      if (!v.empty()) flag_layer[k] = v;
    ctx.resolved = merge_layers({&preset_layer, &config_layer, &flag_layer});
    if (chosen->second.needs_params) {
      ctx.params = to_params(ctx.resolved);
      ctx.resolved = describe(*ctx.params);
      note_spectrum(ctx);
    }

    chosen->second.fn(ctx);

    json manifest;
    manifest["tool"] = "frohlich";
    manifest["version"] = FROHLICH_VERSION;
    manifest["subcommand"] = ctx.subcommand;
    manifest["status"] = "ok";
    if (ctx.params) {
      manifest["parameters"] = params_json(ctx.resolved);
      manifest["derived"] = {{"nbar", ctx.p().nbar},
                             {"N", derive_rates(ctx.p()).N},
                             {"rc_ghz", number(derive_rates(ctx.p()).rc)}};
    } else {
      KeyValues used;
      for (const char* k : {"r_ghz", "f0_thz"})
        if (ctx.resolved.count(k)) used[k] = ctx.resolved.at(k);
      manifest["parameters"] = params_json(used);
    }
    manifest["options"] = ctx.options->to_json();
    manifest["seed"] = ctx.seed;
    manifest["jobs"] = ctx.jobs;
    manifest["format"] = ctx.format;
    manifest["timestamp"] = utc_timestamp();
    manifest["outputs"] = ctx.outputs;
    manifest["notes"] = ctx.notes;
    write_file(ctx.out_dir, "manifest.json", manifest.dump(2) + "\n");

    out << ctx.summary.dump() << "\n";
    return 0;
  } catch (const Error& e) {
    write_error_json(err, category_name(e.category()), e.what());
    if (!ctx.subcommand.empty()) {
      // best effort: a failed run still leaves a manifest behind
      try {
        json manifest;
        manifest["tool"] = "frohlich";
        manifest["version"] = FROHLICH_VERSION;
        manifest["subcommand"] = ctx.subcommand;
        manifest["status"] = "error";
        manifest["error"] = {{"category", category_name(e.category())}, {"message", e.what()}};
        manifest["timestamp"] = utc_timestamp();
        manifest["outputs"] = ctx.outputs;
        write_file(ctx.out_dir, "manifest.json", manifest.dump(2) + "\n");
      } catch (...) {
      }
    }
    return exit_code(e.category());
  } catch (const std::exception& e) {
    write_error_json(err, "internal-error", e.what());
    return 1;
  }
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace frohlich::cli
