#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "frohlich/cli/config.hpp"
#include "frohlich/cli/output.hpp"
#include "frohlich/cli/run.hpp"
#include "frohlich/error.hpp"

using namespace frohlich;
using namespace frohlich::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("frohlich_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

std::string error_category(const std::string& err) {
  return json::parse(err)["error"]["category"].get<std::string>();
}

}  // namespace

TEST(Cli, ExitCodesAreDistinct) {
  std::set<int> codes;
  for (auto c : {ErrorCategory::usage, ErrorCategory::domain, ErrorCategory::config,
                 ErrorCategory::missing_parameter, ErrorCategory::range, ErrorCategory::io})
    codes.insert(exit_code(c));
  EXPECT_EQ(codes.size(), 6u);
  EXPECT_EQ(codes.count(0), 0u);
  EXPECT_EQ(codes.count(1), 0u);
}

TEST(Cli, SteadyWritesTablesAndManifest) {
  const auto dir = scratch("steady");
  const auto r = invoke({"--preset", "bsa-280", "--out", dir.string(), "steady"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto stats = read_json(dir / "stats.json");
  EXPECT_NEAR(stats["fraction"].get<double>(), 0.69, 0.01);
  const auto m = read_json(dir / "manifest.json");
  EXPECT_EQ(m["subcommand"], "steady");
  EXPECT_EQ(m["parameters"]["r_ghz"].get<double>(), 220.0);
  EXPECT_EQ(m["parameters"]["D"].get<int>(), 200);
  for (const auto& f : m["outputs"]) EXPECT_TRUE(fs::exists(dir / f.get<std::string>())) << f;
  const auto csv = slurp(dir / "distribution.csv");
  EXPECT_EQ(csv.rfind("n0,P\n", 0), 0u);
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  EXPECT_FALSE(json::parse(r.out).empty());
}

TEST(Cli, ConfigLayering) {
  const auto dir = scratch("layers");
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "# cold bath\nr_ghz = 11\nnbar = 1.5\n";
  }
  auto r = invoke({"--preset", "bsa-280", "--config", (dir / "run.cfg").string(), "--chi_ghz",
                   "0.07", "--out", (dir / "a").string(), "steady"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto m = read_json(dir / "a" / "manifest.json");
  EXPECT_EQ(m["parameters"]["r_ghz"].get<double>(), 11.0);
  EXPECT_EQ(m["parameters"]["nbar"].get<double>(), 1.5);
  r = invoke({"--preset", "bsa-280", "--config", (dir / "run.cfg").string(), "--r_ghz", "105",
              "--out", (dir / "b").string(), "steady"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_json(dir / "b" / "manifest.json")["parameters"]["r_ghz"].get<double>(), 105.0);
  EXPECT_LT(read_json(dir / "b" / "stats.json")["mandel_q"].get<double>(), 0.0);
}

TEST(Cli, TemperatureReplacesOccupation) {
  const auto dir = scratch("temperature");
  const auto r = invoke({"--preset", "bsa-280", "--temperature_k", "280", "--out", dir.string(), "steady"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto m = read_json(dir / "manifest.json");
  // a pinned temperature is recorded instead of the occupation it implies
  EXPECT_EQ(m["parameters"]["temperature_k"].get<double>(), 280.0);
  EXPECT_FALSE(m["parameters"].contains("nbar"));
  EXPECT_NEAR(m["derived"]["nbar"].get<double>(), planck_occupation(0.314, 280.0), 1e-12);
}

TEST(Cli, ErrorCategories) {
  const auto dir = scratch("errors");
  {
    std::ofstream cfg(dir / "bad.cfg");
    cfg << "r_ghz = 5\nwarp_factor = 9\n";
  }
  auto r = invoke({"--config", (dir / "bad.cfg").string(), "--out", dir.string(), "steady"});
  EXPECT_EQ(r.code, exit_code(ErrorCategory::config));
  EXPECT_EQ(error_category(r.err), "config-error");

  r = invoke({"--r_ghz", "5", "--out", dir.string(), "steady"});
  EXPECT_EQ(r.code, exit_code(ErrorCategory::missing_parameter));
  EXPECT_EQ(error_category(r.err), "missing-parameter");

  r = invoke({"--preset", "bsa-280", "--phi_ghz", "-1", "--out", dir.string(), "steady"});
  EXPECT_EQ(r.code, exit_code(ErrorCategory::range));
  EXPECT_EQ(error_category(r.err), "range-error");

  r = invoke({"--preset", "bsa-280", "steady", "--no-such-flag"});
  EXPECT_EQ(r.code, exit_code(ErrorCategory::usage));
  EXPECT_EQ(error_category(r.err), "usage-error");

  r = invoke({"--config", (dir / "missing.cfg").string(), "steady"});
  EXPECT_EQ(r.code, exit_code(ErrorCategory::io));

  r = invoke({"--preset", "bsa-280", "--out", dir.string(), "sweep"});
  EXPECT_EQ(r.code, exit_code(ErrorCategory::usage));

  r = invoke({"--preset", "bsa-280", "--out", dir.string(), "spectrum"});
  EXPECT_EQ(r.code, exit_code(ErrorCategory::usage));

  r = invoke({"--preset", "bsa-280", "--r_ghz", "0", "--chi_ghz", "0", "--nbar", "0", "--out",
              dir.string(), "coherence"});
  EXPECT_EQ(r.code, exit_code(ErrorCategory::domain));
  EXPECT_EQ(read_json(dir / "manifest.json")["status"], "error");

  r = invoke({});
  EXPECT_EQ(r.code, exit_code(ErrorCategory::usage));
}

TEST(Cli, SweepTableJsonFormat) {
  const auto dir = scratch("sweep_json");
  const auto r = invoke({"--preset", "bsa-34", "--format", "json", "--out", dir.string(), "sweep",
                         "--values", "0.55,11,105"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto t = read_json(dir / "sweep.json");
  ASSERT_EQ(t["rows"].size(), 3u);
  EXPECT_EQ(t["columns"][0], "r_ghz");
  EXPECT_NEAR(t["rows"][1][2].get<double>(), 0.42, 0.03);
  EXPECT_NEAR(t["rows"][2][2].get<double>(), 0.90, 0.03);
}

TEST(Cli, ReplayIsByteIdentical) {
  const auto dir = scratch("replay");
  auto r = invoke({"--phi_ghz", "6", "--chi_ghz", "0.5", "--D", "10", "--nbar", "1", "--r_ghz", "5",
                   "--f0_thz", "0.314", "--seed", "99", "--out", (dir / "a").string(), "ssa",
                   "--samples", "20000"});
  ASSERT_EQ(r.code, 0) << r.err;
  r = invoke({"--from-manifest", (dir / "a" / "manifest.json").string(), "--out", (dir / "b").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir / "a" / "histogram.csv"), slurp(dir / "b" / "histogram.csv"));
  EXPECT_EQ(slurp(dir / "a" / "ssa.json"), slurp(dir / "b" / "ssa.json"));
}

TEST(Cli, ConfigParsing) {
  const auto kv = parse_config_text("r_ghz = 1.5 # pump\n\n# comment\nD=20\n");
  EXPECT_EQ(kv.at("r_ghz"), "1.5");
  EXPECT_EQ(kv.at("D"), "20");
  EXPECT_THROW(parse_config_text("r_ghz 1.5\n"), ConfigError);
  EXPECT_THROW(parse_config_text("r_ghz = 1\nr_ghz = 2\n"), ConfigError);
  EXPECT_THROW(parse_config_text("r_ghz =\n"), ConfigError);
  EXPECT_THROW(parse_config_text("pump = 3\n"), ConfigError);
  EXPECT_THROW(parse_double("r_ghz", "1.5x"), ConfigError);
  EXPECT_THROW(parse_integer("D", "2.5"), ConfigError);
}

TEST(Cli, LayerMerging) {
  const KeyValues a{{"nbar", "16"}, {"r_ghz", "1"}};
  const KeyValues b{{"temperature_k", "280"}};
  const auto m = merge_layers({&a, &b});
  EXPECT_EQ(m.count("nbar"), 0u);
  EXPECT_EQ(m.at("temperature_k"), "280");
  const KeyValues both{{"nbar", "1"}, {"temperature_k", "280"}};
  EXPECT_THROW(merge_layers({&both}), ConfigError);
}

TEST(Cli, DescribeRoundTrips) {
  auto p = preset("lysozyme");
  const auto q = to_params(describe(p));
  EXPECT_EQ(q.r, p.r);
  EXPECT_EQ(q.nbar, p.nbar);
  EXPECT_EQ(q.phi, p.phi);
  EXPECT_EQ(q.D, p.D);
  EXPECT_EQ(q.temperature_k, p.temperature_k);
}

TEST(Cli, NumberFormatting) {
  EXPECT_EQ(format_number(0.1234567890123456), "0.123456789012");
  EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_TRUE(number(std::numeric_limits<double>::infinity()).is_null());
  Table t{{"a", "b"}, {{1.0, 2.5}}};
  EXPECT_EQ(t.to_csv(), "a,b\n1,2.5\n");
}
