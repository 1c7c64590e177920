#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "orbitflow/commands.hpp"

namespace of = orbitflow;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("orbitflow_test_" + std::to_string(::getpid()))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name, const std::string& content) const {
    const auto p = (path_ / name).string();
    std::ofstream(p) << content;
    return p;
  }
  std::string path(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kHeisenbergFull = R"({
  "algebra": {"dim": 3, "structure": [{"i": 1, "j": 2, "k": 3, "value": "1"}]},
  "metric": {"gram": [{"i": 1, "j": 1, "value": 1}, {"i": 2, "j": 2, "value": 1}, {"i": 3, "j": 3, "value": 1}]},
  "invariants": [{"name": "z", "terms": [{"coefficient": "1", "exponents": [0, 0, 1]}]}],
  "hamiltonian": {"name": "xy", "terms": [{"coefficient": "1/2", "exponents": [2, 0, 0]},
                                         {"coefficient": "1/2", "exponents": [0, 2, 0]}]},
  "initial": [1, 0, 2],
  "T": 1.0,
  "dt": 0.01
})";

}  // namespace

TEST(Config, EmptyInputIsAParseError) {
  EXPECT_THROW(of::parse_config_text(""), of::ParseError);
  EXPECT_THROW(of::parse_config_text("  \n "), of::ParseError);
}

TEST(Config, SyntaxErrorsReportLine) {
  try {
    of::parse_config_text("{\n  \"algebra\": {\n  \"dim\": 3,,\n}");
    FAIL();
  } catch (const of::ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Config, MissingFieldsNameTheirPath) {
  try {
    of::parse_config_text(R"({"algebra": {"dim": 2}, "metric": {"gram": [{"i": 1, "j": 1}]}})");
    FAIL();
  } catch (const of::ParseError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("metric.gram[0]"), std::string::npos) << msg;
    EXPECT_NE(msg.find("'value'"), std::string::npos) << msg;
  }
}

TEST(Config, RejectsBadValues) {
  auto with = [](const std::string& key, const std::string& value) {
    auto j = of::Json::parse(kHeisenbergFull);
    j[key] = of::Json::parse(value);
    return j.dump();
  };
  EXPECT_THROW(of::parse_config_text(with("sign", "2")), of::ParseError);
  EXPECT_THROW(of::parse_config_text(with("dt", "0")), of::ParseError);
  EXPECT_THROW(of::parse_config_text(with("initial", "[1, 2]")), of::ParseError);
  EXPECT_THROW(of::parse_config_text(with("checks", R"(["bogus"])")), of::ParseError);
  EXPECT_THROW(of::parse_config_text(with("mode", R"("split")")), of::ParseError);
  EXPECT_THROW(of::parse_config_text(with("hamiltonian", R"("nope")")), of::ParseError);
}

TEST(Config, CatalogExportRoundTrips) {
  for (const auto& e : {of::example_i(), of::example_ii(), of::example_iii(), of::oscillator(2)})
    for (const auto& s : e.systems()) {
      const auto text = of::config_text(of::catalog_config(e, s.id, 1e-3, 5));
      EXPECT_EQ(of::config_text(of::parse_config_text(text)), text) << e.label() << "/" << s.id;
    }
}

TEST(Config, ModelMatchesCatalogSystem) {
  const auto e = of::example_ii();
  const auto c = of::catalog_config(e, "H4");
  const auto model = of::build_model(c);
  const auto sys = of::build_system(c, model);
  const auto direct = e.system("H4");
  EXPECT_EQ(sys.sign, direct.sign);
  EXPECT_EQ(of::vector_field(sys, sys.initial), of::vector_field(direct, direct.initial));
}

TEST(Runs, ValidateFlagsBrokenJacobi) {
  auto j = of::Json::parse(kHeisenbergFull);
  j["algebra"]["structure"].push_back({{"i", 2}, {"j", 3}, {"k", 1}, {"value", "1"}});
  j["algebra"]["structure"].push_back({{"i", 1}, {"j", 3}, {"k", 1}, {"value", "1"}});
  const auto v = of::validate_config(of::parse_config(j));
  EXPECT_FALSE(v.passed);
  bool named = false;
  for (const auto& item : v.report["checks"])
    if (item["name"] == "jacobi") {
      EXPECT_FALSE(item["passed"].get<bool>());
      named = item.contains("triple");
    }
  EXPECT_TRUE(named) << v.report.dump();
}

TEST(Runs, ValidatePassesForCatalog) {
  for (const auto& e : {of::example_i(), of::example_ii(), of::example_iii()})
    for (const auto& s : e.systems())
      EXPECT_TRUE(of::validate_config(of::catalog_config(e, s.id)).passed) << e.label() << "/" << s.id;
}

TEST(Runs, SimulateIsDeterministicAndSummarised) {
  const auto c = of::catalog_config(of::example_iii(), "sis22");
  const auto a = of::simulate(c, 1.0, 0.01), b = of::simulate(c, 1.0, 0.01);
  EXPECT_EQ(a.csv, b.csv);
  EXPECT_EQ(a.summary.dump(), b.summary.dump());
  EXPECT_EQ(a.csv.substr(0, a.csv.find('\n')), "t,x_1,x_2,x_3,x_4");
  EXPECT_EQ(a.trajectory.size(), 101u);
  EXPECT_LT(a.summary["closed_form_deviation"].get<double>(), 1e-8);
}

TEST(Runs, FullModeSimulationWithoutSplit) {
  const auto r = of::simulate(of::parse_config_text(kHeisenbergFull));
  EXPECT_FALSE(r.diverged);
  // The central coordinate is a Casimir, so it is conserved exactly here.
  EXPECT_EQ(r.trajectory.final_state()[2], 2.0);
}

TEST(Runs, CheckPassesForCatalogSystems) {
  for (const auto& e : {of::example_i(), of::example_iii(), of::oscillator(1)})
    for (const auto& s : e.systems()) {
      const auto r = of::check_config(of::catalog_config(e, s.id, 1e-2));
      EXPECT_TRUE(r.passed) << r.report.dump(1);
    }
}

TEST(Cli, ExitCodes) {
  TempDir dir;
  std::ostringstream sink;
  EXPECT_EQ(of::cli::cmd_validate(dir.file("empty.json", ""), std::nullopt, std::nullopt, sink), of::cli::kParseError);
  EXPECT_EQ(of::cli::cmd_validate(dir.path("absent.json"), std::nullopt, std::nullopt, sink), of::cli::kParseError);

  auto broken = of::Json::parse(kHeisenbergFull);
  broken["algebra"]["structure"].push_back({{"i", 2}, {"j", 3}, {"k", 1}, {"value", "1"}});
  broken["algebra"]["structure"].push_back({{"i", 1}, {"j", 3}, {"k", 1}, {"value", "1"}});
  EXPECT_EQ(of::cli::cmd_validate(dir.file("broken.json", broken.dump()), std::nullopt, std::nullopt, sink),
            of::cli::kValidationFailure);

  const auto good = dir.file("good.json", kHeisenbergFull);
  EXPECT_EQ(of::cli::cmd_validate(good, std::nullopt, std::nullopt, sink), of::cli::kOk);
  EXPECT_EQ(of::cli::cmd_catalog_export("nope", std::nullopt, 1, std::nullopt, std::nullopt, std::nullopt, sink),
            of::cli::kValidationFailure);
}

TEST(Cli, SimulateDivergenceWritesPrefix) {
  TempDir dir;
  const auto cfg = dir.file("blowup.json", R"({
    "algebra": {"dim": 2, "structure": [{"i": 1, "j": 2, "k": 2, "value": 1}]},
    "metric": {"gram": [{"i": 1, "j": 1, "value": 1}, {"i": 2, "j": 2, "value": 1}]},
    "hamiltonian": {"name": "x1x2", "terms": [{"coefficient": 1, "exponents": [1, 1]}]},
    "initial": [0, 1], "T": 2, "dt": 0.001})");
  std::ostringstream sink;
  const auto out = dir.path("traj.csv"), summary = dir.path("summary.json");
  EXPECT_EQ(of::cli::cmd_simulate(cfg, std::nullopt, std::nullopt, out, summary, std::nullopt,
                                  of::cli::TrajectoryFormat::csv, sink),
            of::cli::kDivergence);
  const auto csv = slurp(out);
  EXPECT_GT(std::count(csv.begin(), csv.end(), '\n'), 500);
  EXPECT_TRUE(of::Json::parse(slurp(summary))["diverged"].get<bool>());
}

TEST(Cli, ExportThenCheckThroughFiles) {
  TempDir dir;
  std::ostringstream sink;
  const auto cfg = dir.path("osc.json");
  ASSERT_EQ(of::cli::cmd_catalog_export("oscillator", std::nullopt, 2, 0.01, 3, cfg, sink), of::cli::kOk);
  EXPECT_EQ(of::parse_config_text(slurp(cfg)).catalog->n, 2u);
  const auto report = dir.path("check.json");
  EXPECT_EQ(of::cli::cmd_check(cfg, report, std::nullopt, sink), of::cli::kOk);
  EXPECT_TRUE(of::Json::parse(slurp(report))["passed"].get<bool>());
  EXPECT_FALSE(fs::exists(report + ".tmp"));
}

TEST(Cli, CatalogListing) {
  std::ostringstream text, json;
  of::cli::cmd_catalog_list(of::cli::TrajectoryFormat::csv, text);
  EXPECT_EQ(text.str(), "example_i\nexample_ii\nexample_iii\noscillator\n");
  of::cli::cmd_catalog_list(of::cli::TrajectoryFormat::json, json);
  EXPECT_EQ(of::Json::parse(json.str()).size(), 4u);
}
