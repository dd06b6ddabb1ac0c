#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "nlsplit/harness.hpp"
#include "nlsplit/report.hpp"

using namespace nlsplit;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("nlsplit_test_" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST(FitSlope, ExactPowerLaws) {
  auto f = fit_slope({1.0, 0.5}, {1.0, 0.25});
  EXPECT_DOUBLE_EQ(f.slope, 2.0);
  EXPECT_NEAR(f.residual, 0.0, 1e-15);
  f = fit_slope({1.0, 0.5}, {3.0, 3.0});
  EXPECT_DOUBLE_EQ(f.slope, 0.0);
  EXPECT_FALSE(std::isfinite(f.ci_low));
}

TEST(FitSlope, NoisyCubicData) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::vector<double> x, y;
  for (double e = 0.2; e > 0.01; e /= 1.5) {
    x.push_back(e);
    y.push_back(std::pow(e, 3) * (1 + noise(rng)));
  }
  const auto f = fit_slope(x, y);
  EXPECT_GE(f.slope, 2.9);
  EXPECT_LE(f.slope, 3.1);
  EXPECT_LT(f.ci_low, f.slope);
  EXPECT_GT(f.ci_high, f.slope);
}

TEST(FitSlope, ExcludesNonPositiveAndNeedsTwoPoints) {
  const auto f = fit_slope({1.0, 0.5, 0.25}, {1.0, 0.0, 0.0625});
  EXPECT_EQ(f.points_excluded, 1);
  EXPECT_EQ(f.points_used, 2);
  EXPECT_DOUBLE_EQ(f.slope, 2.0);
  EXPECT_THROW(fit_slope({1.0, 0.5}, {1.0, 0.0}), ValidationError);
  EXPECT_THROW(fit_slope({1.0}, {1.0, 2.0}), ValidationError);
}

TEST(FitEntry, AcceptanceNeedsResidualAndWindow) {
  FitEntry e;
  e.lower = 1.5;
  e.upper = 2.5;
  EXPECT_FALSE(e.accepted(0.5));
  e.fit = FitResult{2.0, 0.0, 0.1};
  EXPECT_TRUE(e.accepted(0.5));
  e.fit->residual = 0.6;
  EXPECT_FALSE(e.accepted(0.5));
  e.fit->residual = 0.1;
  e.fit->slope = 2.6;
  EXPECT_FALSE(e.accepted(0.5));
}

TEST(Config, ValidationErrors) {
  ExperimentConfig c;
  EXPECT_NO_THROW(validate_config(c));
  c.epsilons = {0.05, 0.1};
  EXPECT_THROW(validate_config(c), ValidationError);
  c = {};
  c.c0 = 6.3;
  EXPECT_THROW(validate_config(c), ValidationError);
  c = {};
  c.h_rule = "explicit";
  EXPECT_THROW(validate_config(c), ValidationError);
  c = {};
  c.horizon_rule = "forever";
  EXPECT_THROW(validate_config(c), ValidationError);
}

TEST(Config, HorizonRules) {
  ExperimentConfig c;
  EXPECT_DOUBLE_EQ(resolve_horizon(c, 0.1), 100.0);
  EXPECT_DOUBLE_EQ(resolve_horizon(c, 0.05), 200.0);
  c.horizon_rule = "inverse_eps";
  EXPECT_DOUBLE_EQ(resolve_horizon(c, 0.05), 20.0);
  c.horizon_rule = "theorem";
  c.N = 3;
  EXPECT_NEAR(resolve_horizon(c, 0.1), 100.0, 1e-12);
  c.horizon_rule = "fixed";
  EXPECT_DOUBLE_EQ(resolve_horizon(c, 0.1), c.final_time);
  EXPECT_DOUBLE_EQ(resolve_step(ExperimentConfig{}), 0.0078125);
}

TEST(Config, JsonRoundTripAndUnknownKeys) {
  ExperimentConfig c;
  c.scheme = "yoshida_4";
  c.K = 8;
  c.epsilons = {0.2, 0.1};
  c.h = 0.01;
  c.h_rule = "explicit";
  c.profile = InitialProfile::named("random", 17);
  c.precision = Precision::compensated;
  const auto j = config_to_json(c);
  const auto d = config_from_json(j);
  EXPECT_EQ(config_to_json(d), j);
  EXPECT_THROW(config_from_json(nlohmann::json{{"K", 8}, {"kappa", 1}}), ValidationError);
  EXPECT_THROW(config_from_json(nlohmann::json{{"K", "eight"}}), ValidationError);
  std::string out;
  config_from_json(nlohmann::json{{"output_dir", "x/y"}}, &out);
  EXPECT_EQ(out, "x/y");
}

TEST(Config, LoadReportsLineAndColumn) {
  const fs::path d = fresh_dir("cfg");
  fs::create_directories(d);
  std::ofstream(d / "bad.json") << "{\n  \"K\": 8,\n  \"N\": ,\n}\n";
  try {
    load_config(d / "bad.json");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.json:3:"), std::string::npos) << e.what();
  }
}

TEST(Drift, PlaneWaveIsExact) {
  ExperimentConfig c;
  c.profile = InitialProfile::named("plane_wave");
  c.horizon_rule = "inverse_eps";
  const auto rep = drift_experiment(c);
  ASSERT_EQ(rep.points.size(), 3u);
  for (const auto& p : rep.points) {
    EXPECT_LE(p["max_e_dev_scaled"].get<double>() * std::pow(p["epsilon"].get<double>(), 2), 1e-12);
    EXPECT_LE(p["max_h1_dev_scaled"].get<double>() * std::pow(p["epsilon"].get<double>(), 2), 1e-12);
  }
}

TEST(Drift, HalvingEpsDoublesStepsAtFixedH) {
  ExperimentConfig c;
  c.h = 0.005;
  c.h_rule = "explicit";
  c.horizon_rule = "inverse_eps";
  c.epsilons = {0.2, 0.1, 0.05};
  const auto rep = drift_experiment(c);
  EXPECT_EQ(rep.points[0]["steps"].get<long long>(), 1000);
  EXPECT_EQ(rep.points[1]["steps"].get<long long>(), 2000);
  EXPECT_EQ(rep.points[2]["steps"].get<long long>(), 4000);
}

TEST(Drift, StepBudgetCapsHorizon) {
  ExperimentConfig c;
  c.epsilons = {0.1};
  c.step_budget = 100;
  const auto rep = drift_experiment(c);
  EXPECT_TRUE(rep.points[0]["capped"].get<bool>());
  EXPECT_EQ(rep.points[0]["steps"].get<long long>(), 100);
}

TEST(Drift, MassSentinelAndSeries) {
  ExperimentConfig c;
  c.horizon_rule = "inverse_eps";
  const auto rep = drift_experiment(c);
  for (const auto& p : rep.points) EXPECT_LE(p["max_mass_rel_dev"].get<double>(), 1e-12);
  ASSERT_EQ(rep.series.size(), 3u);
  EXPECT_LE(rep.series[0].rows.size(), static_cast<std::size_t>(c.max_series_rows) + 1);
  EXPECT_EQ(rep.series[0].rows.front().e_dev_scaled, 0.0);
  ASSERT_NE(rep.find_fit("energy_deviation"), nullptr);
  ASSERT_NE(rep.find_fit("h1_deviation"), nullptr);
}

TEST(Drift, CflViolationRejected) {
  ExperimentConfig c;
  c.h = 0.05;
  c.h_rule = "explicit";
  EXPECT_THROW(drift_experiment(c), ValidationError);
  c.demote_cfl = true;
  c.horizon_rule = "fixed";
  c.final_time = 0.5;
  const auto rep = drift_experiment(c);
  EXPECT_FALSE(rep.warnings.empty());
}

TEST(Parallel, JobCountDoesNotChangeReports) {
  ExperimentConfig c;
  c.horizon_rule = "inverse_eps";
  c.jobs = 1;
  const auto a = report_to_json(drift_experiment(c));
  c.jobs = 3;
  const auto b = report_to_json(drift_experiment(c));
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_FALSE(a["config"].contains("jobs"));
}

TEST(Order, DeterministicAndSelfDescribing) {
  ExperimentConfig c;
  c.epsilons = {0.1};
  c.schemes = {"lie_trotter_1", "strang_1"};
  c.final_time = 1.0;
  c.h_list = {0.02, 0.01};
  const auto a = report_to_json(order_study(c));
  const auto b = report_to_json(order_study(c));
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_EQ(a["config"], config_to_json(c));
  EXPECT_EQ(a["version"], version());
  for (const auto& f : a["fits"]) EXPECT_TRUE(f.contains("residual")) << f["name"];
}

TEST(Mfe, ZeroDataMeasuresZero) {
  ExperimentConfig c;
  c.K = 4;
  const auto m = measure_mfe(ModeVector(4), 0.1, *find_builtin_scheme("strang_1"), c);
  EXPECT_EQ(m.reconstruct_error, 0.0);
  EXPECT_EQ(m.defect_over_h, 0.0);
  EXPECT_EQ(m.defect_K, 0.0);
  EXPECT_EQ(m.approx_error, 0.0);
  EXPECT_EQ(m.invariant_step, 0.0);
  EXPECT_EQ(m.invariant_vs_h1, 0.0);
}

TEST(Mfe, ReconstructionExactAtStart) {
  ExperimentConfig c;
  c.K = 8;
  c.epsilons = {0.2, 0.1, 0.05};
  const auto rep = mfe_validation(c);
  ASSERT_EQ(rep.points.size(), 3u);
  for (const auto& p : rep.points) EXPECT_LE(p["reconstruct_error"].get<double>(), 1e-12);
  EXPECT_EQ(rep.fits.size(), 5u);
}

TEST(Interface, NormHypothesisLogged) {
  ExperimentConfig c;
  c.K = 8;
  c.epsilons = {0.2, 0.1, 0.05};
  const auto rep = interface_study(c);
  for (const auto& p : rep.points) {
    EXPECT_TRUE(p["norm_within_bound"].get<bool>());
    EXPECT_LE(p["interface_norm"].get<double>(), 2 * p["epsilon"].get<double>());
    EXPECT_EQ(p["n_hat"].get<long long>(), std::llround(1.0 / (p["epsilon"].get<double>() * p["h"].get<double>())));
  }
}

TEST(Report, CsvHeaderAndNumbers) {
  Series s{"x", 0.1, 0.01, {{0.0, 1.0, 2.0, 3.0, 0.0, 0.0}, {0.5, 1.0, 2.0, 3.0 + 1e-17, 0.1, 0.2}}};
  const std::string csv = series_to_csv(s);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,mass,h1_sq,energy,e_dev_scaled,h1_dev_scaled");
  EXPECT_NE(csv.find("0.10000000000000001"), std::string::npos);
  EXPECT_EQ(format_number(1.0 / 3.0), "0.33333333333333331");
}

TEST(Report, PlotFilesPerSeriesPlusFits) {
  ExperimentConfig c;
  c.horizon_rule = "inverse_eps";
  const auto rep = drift_experiment(c);
  const fs::path d = fresh_dir("plot");
  const auto files = emit_plot_data(rep, d, "drift");
  EXPECT_EQ(files.size(), 4u);
  std::vector<std::string> before;
  for (const auto& f : files) before.push_back(slurp(f));
  const auto again = emit_plot_data(rep, d, "drift");
  for (std::size_t i = 0; i < again.size(); ++i) EXPECT_EQ(slurp(again[i]), before[i]) << again[i];
  const auto written = write_report(rep, d, "drift");
  EXPECT_EQ(written.size(), 4u);
  EXPECT_TRUE(fs::exists(d / "drift.json"));
}

TEST(Report, EmptySeriesGivesHeaderOnly) {
  ExperimentReport rep;
  rep.kind = "drift";
  rep.series.push_back({"empty", 0.1, 0.01, {}});
  const fs::path d = fresh_dir("empty");
  const auto files = emit_plot_data(rep, d, "e");
  ASSERT_EQ(files.size(), 2u);
  const std::string text = slurp(files[0]);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
  EXPECT_EQ(text[0], '#');
  EXPECT_EQ(series_to_csv(rep.series[0]), "t,mass,h1_sq,energy,e_dev_scaled,h1_dev_scaled\n");
}

TEST(Report, UnwritableDirectory) {
  const fs::path d = fresh_dir("blocked");
  std::ofstream(d.string()) << "file in the way";
  ExperimentReport rep;
  EXPECT_THROW(write_report(rep, d / "sub", "r"), std::exception);
  fs::remove(d);
}
