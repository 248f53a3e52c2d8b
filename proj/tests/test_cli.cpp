#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <secbeam/secbeam.hpp>

#include "cli.hpp"
#include "emit.hpp"

using namespace secbeam;

namespace {

struct cli_result {
  int code = 0;
  std::string out;
  std::string err;
};

cli_result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "secbeam");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  cli_result r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << content;
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, SsopMatchesLibrary) {
  const auto r = run_cli({"ssop", "--array", "ula", "--n", "8", "--spacing", "0.5", "--theta-b-deg", "0", "--k", "inf", "--beta", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"theta_b_deg", "value"}));
  const double lib = ssop_deterministic(Ula{8, 0.5}, 0.0, SystemParams{}, deg_to_rad(0.25));
  EXPECT_EQ(rows[1][1], cli::format_double(lib));
  EXPECT_NE(r.err.find("ssop"), std::string::npos);
}

TEST(Cli, PatternAreaTwoElements) {
  const auto r = run_cli({"pattern-area", "--array", "ula", "--n", "2", "--spacing", "0.5", "--theta-b-deg", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(std::stod(csv_rows(r.out)[1][1]), 4.3718, 1e-3);
}

TEST(Cli, HelpExitsZero) {
  auto r = run_cli({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("Usage"), std::string::npos);
  r = run_cli({"ssop", "--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("3.4594"), std::string::npos);
  EXPECT_NE(r.out.find("0.0001"), std::string::npos);
}

TEST(Cli, UnknownSubcommandIsUsageError) {
  const auto r = run_cli({"frobnicate"});
  EXPECT_EQ(r.code, cli::usage);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
  EXPECT_EQ(run_cli({}).code, cli::usage);
  EXPECT_EQ(run_cli({"ssop", "--no-such-flag", "1"}).code, cli::usage);
}

TEST(Cli, DomainAndParseErrors) {
  EXPECT_EQ(run_cli({"ssop", "--n", "1"}).code, cli::domain_failure);
  EXPECT_EQ(run_cli({"ssop", "--k", "many"}).code, cli::parse_failure);
  const auto bad = temp_file("secbeam_bad_pattern.csv", "theta_deg,gain\n0,1\n0,2\n");
  EXPECT_EQ(run_cli({"ingest-pattern", "--pattern-file", bad.string()}).code, cli::parse_failure);
  std::filesystem::remove(bad);
  EXPECT_EQ(run_cli({"zones", "--out", "/nonexistent/dir/out.csv"}).code, cli::domain_failure);
  EXPECT_EQ(run_cli({"hpbw-free", "--n", "8"}).code, cli::usage);
}

TEST(Cli, ReRunsAreByteIdentical) {
  const std::vector<std::string> args = {"mc-validate", "--array", "ula", "--n", "8", "--k", "1", "--beta", "3",
                                         "--trials", "20000", "--seed", "9"};
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(csv_rows(a.out)[0], (std::vector<std::string>{"trial_count", "estimate", "std_error", "seed"}));
}

TEST(Cli, RadiusSweepRowCount) {
  const auto r = run_cli({"pattern-area", "--array", "uca", "--n", "8", "--sweep", "r", "--from", "0.4", "--to", "2.4", "--step", "0.01"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  EXPECT_EQ(rows.size(), 202u);
  EXPECT_EQ(rows[0][0], "r_wavelengths");
}

TEST(Cli, JsonMatchesCsv) {
  const std::vector<std::string> base = {"bound", "--array", "uca", "--n", "8", "--radius", "1.75", "--sweep", "theta_b", "--to", "22.5"};
  auto csv_args = base;
  auto json_args = base;
  json_args.insert(json_args.end(), {"--format", "json"});
  const auto c = run_cli(csv_args);
  const auto j = run_cli(json_args);
  ASSERT_EQ(c.code, 0);
  ASSERT_EQ(j.code, 0);
  const auto rows = csv_rows(c.out);
  const auto doc = nlohmann::json::parse(j.out);
  ASSERT_EQ(doc.size() + 1, rows.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    EXPECT_EQ(doc[i]["theta_b_deg"].get<double>(), std::stod(rows[i + 1][0]));
    EXPECT_EQ(doc[i]["value"].get<double>(), std::stod(rows[i + 1][1]));
  }
}

TEST(Cli, ConfigMergedUnderFlags) {
  const auto cfg = temp_file("secbeam_cfg.txt", "# manifest\nbeta = 3\nk = 1\n");
  const auto from_cfg = run_cli({"ssop", "--config", cfg.string()});
  const auto explicit_flags = run_cli({"ssop", "--beta", "3", "--k", "1"});
  ASSERT_EQ(from_cfg.code, 0) << from_cfg.err;
  EXPECT_EQ(from_cfg.out, explicit_flags.out);
  const auto overridden = run_cli({"ssop", "--config", cfg.string(), "--beta", "2", "--k", "inf"});
  EXPECT_EQ(overridden.out, run_cli({"ssop"}).out);
  std::filesystem::remove(cfg);
  const auto bad = temp_file("secbeam_cfg_bad.txt", "gamma=1\n");
  EXPECT_EQ(run_cli({"ssop", "--config", bad.string()}).code, cli::parse_failure);
  std::filesystem::remove(bad);
  EXPECT_EQ(run_cli({"ssop", "--config", "/nonexistent.cfg"}).code, cli::parse_failure);
}

TEST(Cli, DecibelInputs) {
  const auto a = run_cli({"ssop", "--noise-var-db", "-40"});
  const auto b = run_cli({"ssop", "--snr-db", "40"});
  const auto c = run_cli({"ssop"});
  EXPECT_EQ(a.out, c.out);
  EXPECT_EQ(b.out, c.out);
}

TEST(Cli, ZonesAndSelect) {
  auto r = run_cli({"zones", "--n", "8"});
  ASSERT_EQ(r.code, 0);
  auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[3][4], "0.5");
  r = run_cli({"select", "--n", "8", "--radius", "1.6", "--d", "50", "--theta-deg", "45"});
  ASSERT_EQ(r.code, 0) << r.err;
  rows = csv_rows(r.out);
  EXPECT_EQ(rows[1][0], "2");
  EXPECT_EQ(rows[1][1], "M22");
  EXPECT_EQ(run_cli({"select", "--n", "8", "--radius", "1.6", "--d", "500", "--theta-deg", "45"}).code, cli::domain_failure);
}

TEST(Cli, LutSingleZone) {
  const auto r = run_cli({"lut", "--n", "8", "--radius", "1.6", "--zone", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"theta_from_deg", "theta_to_deg", "mode"}));
  EXPECT_EQ(rows[1], (std::vector<std::string>{"0", "90", "M1"}));
}

TEST(Cli, OptimizeRadiusCurve) {
  const auto r = run_cli({"optimize-radius", "--n", "8", "--r-min", "1.68", "--r-max", "1.84", "--r-step", "0.08"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(csv_rows(r.out).size(), 4u);
  EXPECT_NE(r.err.find("r_opt 1.76"), std::string::npos);
}

TEST(Cli, PatternPipelineLeavesInputsUntouched) {
  std::ostringstream text;
  write_pattern_csv(text, pattern_from_geometry(Ula{8, 0.5}, 0.0, degree_grid(-90.0, 90.0, 1.0)));
  const auto in = temp_file("secbeam_half.csv", text.str());
  const std::string before = slurp(in);

  auto r = run_cli({"ingest-pattern", "--pattern-file", in.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("# extension: ula_mirror"), std::string::npos);

  r = run_cli({"correlate", "--a", in.string(), "--b", in.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(csv_rows(r.out)[1][0], "1");

  r = run_cli({"ssop-measured", "--pattern-file", in.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const double v = std::stod(csv_rows(r.out)[1][1]);
  EXPECT_NEAR(v, ssop_deterministic(Ula{8, 0.5}, 0.0, SystemParams{}, deg_to_rad(0.25)), 1e-3);

  r = run_cli({"ssop-measured", "--pattern-file", in.string(), "--compensation", "published-ula"});
  ASSERT_EQ(r.code, 0) << r.err;

  EXPECT_EQ(slurp(in), before);
  std::filesystem::remove(in);
}

TEST(Cli, AttenuationAndMeasuredZones) {
  auto r = run_cli({"attenuation", "--profile", "published-uca", "--step-deg", "15"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(csv_rows(r.out).size(), 8u);
  r = run_cli({"zones-measured", "--n", "8", "--attenuation", "constant", "--f-constant", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, run_cli({"zones", "--n", "8"}).out);
}

TEST(Cli, TradeoffAndErrorAnalysis) {
  auto r = run_cli({"tradeoff", "--n", "8", "--radius", "1.6", "--values", "8,4,2", "--thetab-step-deg", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(csv_rows(r.out).size(), 4u);
  r = run_cli({"error-analysis", "--n", "8", "--r-min", "1.6", "--r-max", "1.7", "--r-step", "0.1", "--thetab-step-deg", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(csv_rows(r.out)[0], (std::vector<std::string>{"r_wavelengths", "err"}));
}
