#include "starmd/errors.hpp"
#include "starmd/harness.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace starmd;

namespace {

GapSeries synthetic(int n, double (*f)(double)) {
  GapSeries s;
  for (int t = 1; t <= n; ++t) {
    s.t.push_back(t);
    s.gap.push_back(f(t));
  }
  return s;
}

std::string csv_of(const ExperimentConfig& c) {
  std::ostringstream os;
  write_trace_csv(os, run_experiment(c).run.rows);
  return os.str();
}

}  // namespace

TEST(Trace, HeaderAndCounters) {
  ExperimentConfig c;
  c.T = 256;
  const ExperimentResult r = run_experiment(c);
  std::ostringstream os;
  write_trace_csv(os, r.run.rows);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kTraceHeader);
  int n = 0;
  while (std::getline(in, line)) ++n;
  EXPECT_EQ(n, 256);
  std::uint64_t prev = 0;
  for (const auto& row : r.run.rows) {
    const std::uint64_t total = row.value_calls + row.grad_calls;
    ASSERT_GT(total, prev);
    prev = total;
  }
}

TEST(Trace, Deterministic) {
  ExperimentConfig c;
  c.problem = "pnormpow:p=1.5,k=1.5";
  c.mode = Mode::General;
  c.dim = 20;
  c.T = 200;
  c.seed = 4;
  EXPECT_EQ(csv_of(c), csv_of(c));
  // Catalog norms and objectives are sign symmetric, so traces starting at 0
  // ignore the seed; the radial start point does not.
  ExperimentConfig d = c;
  d.seed = 5;
  EXPECT_EQ(csv_of(c), csv_of(d));
  ExperimentConfig r;
  r.problem = "radialstar:a=0.5,k=3";
  r.dim = 2;
  r.T = 50;
  ExperimentConfig r2 = r;
  r2.seed = 2;
  EXPECT_EQ(csv_of(r), csv_of(r));
  EXPECT_NE(csv_of(r), csv_of(r2));
}

TEST(Trace, WritesFileAndReadsBack) {
  const auto path = std::filesystem::temp_directory_path() / "starmd_trace_test.csv";
  ExperimentConfig c;
  c.T = 80;
  c.out = path.string();
  const ExperimentResult r = run_experiment(c);
  std::ifstream in(path);
  const GapSeries s = read_gap_series(in);
  ASSERT_EQ(s.t.size(), 80u);
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    EXPECT_EQ(s.t[i], r.run.rows[i].t);
    EXPECT_EQ(s.gap[i], *r.run.rows[i].gap);
  }
  std::filesystem::remove(path);
}

TEST(Trace, ReadSkipsEmptyGaps) {
  std::istringstream in(std::string(kTraceHeader) +
                        "\n1,0.5,2,3,1,0.25,,0,1,1,1\n2,0.5,2,6,2,,,0,1,1,1\n");
  const GapSeries s = read_gap_series(in);
  ASSERT_EQ(s.t.size(), 1u);
  EXPECT_EQ(s.gap[0], 0.25);
}

TEST(Experiment, GeneralModeDecreasesGap) {
  ExperimentConfig c;
  c.problem = "pnormpow:p=1.5,k=1.5,cond=1e4";
  c.mode = Mode::General;
  c.dim = 30;
  c.T = 4096;
  const ExperimentResult r = run_experiment(c);
  EXPECT_LE(*r.run.rows.back().gap, *r.run.initial_gap / 1e3);
}

TEST(Experiment, ModeMustFitProblem) {
  ExperimentConfig c;
  c.mode = Mode::General;
  EXPECT_THROW(prepare(c), std::invalid_argument);
}

TEST(FitRate, PowerLaw) {
  const RateFit f = fit_rate(synthetic(1000, [](double t) { return std::pow(t, -2.0); }));
  EXPECT_NEAR(f.slope, -2.0, 1e-9);
  EXPECT_NEAR(f.t_lo, 500.0, 1.0);
  EXPECT_EQ(f.t_hi, 1000.0);
  EXPECT_LT(f.residual, 1e-9);
}

TEST(FitRate, LogFactorFlattensSlope) {
  const RateFit f = fit_rate(
      synthetic(4096, [](double t) { return 5.0 * std::pow(t, -1.25) * std::log(t); }));
  // Local slope of t^-1.25 log t is -1.25 + 1/log t, about -1.124 mid-window.
  EXPECT_NEAR(f.slope, -1.25 + 1.0 / std::log(std::sqrt(2048.0 * 4096.0)), 5e-3);
  EXPECT_GT(f.slope, -1.25);
}

TEST(FitRate, ConstantAndClamping) {
  EXPECT_NEAR(fit_rate(synthetic(200, [](double) { return 3.0; })).slope, 0.0, 1e-12);
  GapSeries s = synthetic(200, [](double t) { return 1.0 / t; });
  s.gap[199] = 0.0;
  s.gap[198] = -1e-17;
  EXPECT_EQ(fit_rate(s).clamped, 2);
  EXPECT_NEAR(fit_rate(s, 150.0).slope, -1.0, 1e-9);
  EXPECT_THROW(fit_rate(synthetic(63, [](double t) { return 1.0 / t; })), std::invalid_argument);
}

TEST(L1Reduction, Inflation) {
  EXPECT_NEAR(l1_reduction(100, 1e-12, 2.0).inflation, 1.0, 1e-9);
  EXPECT_NEAR(l1_reduction(100, 0.5, 1.5).inflation, std::pow(100.0, 0.5), 1e-12);
  const L1Reduction r = l1_reduction(100, 0.5, 1.5);
  EXPECT_NEAR(r.geometry.mu(), 0.5, 1e-15);
  EXPECT_EQ(r.geometry.q(), 2.0);
  EXPECT_THROW(l1_reduction(100, 0.0, 1.5), std::invalid_argument);
}

TEST(Baseline, StaysAtMinimizer) {
  const CatalogEntry e = make_problem("quad:cond=100", 10, 2);
  const Geometry g(e.problem.norm);
  const RunResult r = baseline_mirror_descent(e.problem, g, *e.problem.minimizer, 20);
  EXPECT_NEAR(*r.rows.back().gap, 0.0, 1e-15);
  EXPECT_EQ(r.calls.grad_calls, 20u);
}

TEST(Baseline, AcceleratedRateIsFaster) {
  const CatalogEntry e = make_problem("quad", 50, 1);
  const Geometry g(e.problem.norm);
  const RunResult base = baseline_mirror_descent(e.problem, g, e.start, 2048);
  const double b = fit_rate(base.rows).slope;
  EXPECT_NEAR(b, -1.0, 0.2);
  SolverOptions o;
  o.mode = Mode::Smooth;
  o.T = 2048;
  const double a = fit_rate(run(e.problem, g, e.start, o).rows).slope;
  EXPECT_LT(a, b - 0.5);
}

TEST(Json, NormRoundTrip) {
  const NormSpec n = NormSpec::composite(NormSpec::pnorm(1.5), NormSpec::pnorm(2.0), 0.3, 4);
  EXPECT_EQ(norm_from_json(to_json(n)).describe(), n.describe());
  EXPECT_EQ(norm_from_json(Json{{"p", 3.0}}).as_pnorm().p, 3.0);
  EXPECT_THROW(norm_from_json(Json{{"q", 3.0}}), std::invalid_argument);
}

TEST(Json, ConfigRoundTrip) {
  ExperimentConfig c;
  c.problem = "pnormpow:p=1.5,k=1.5";
  c.mode = Mode::General;
  c.T = 99;
  c.alpha = 0.25;
  c.seed = 12;
  c.l1_s = 0.5;
  c.norm = NormSpec::pnorm(1.5);
  const ExperimentConfig d = config_from_json(to_json(c));
  EXPECT_EQ(to_json(d), to_json(c));
  const ExperimentConfig e = config_from_json(Json{{"T", 7}}, c);
  EXPECT_EQ(e.T, 7);
  EXPECT_EQ(e.problem, c.problem);
  EXPECT_THROW(config_from_json(Json{{"iterations", 7}}), std::invalid_argument);
}

TEST(Json, GameReport) {
  const Json j = to_json(run_adversary_game(1.0, 1e-3, 1e6, QueryStrategy::Bisection, 3));
  EXPECT_EQ(j.at("N"), 3);
  EXPECT_EQ(j.at("strategy"), "bisection");
  EXPECT_TRUE(j.at("verdict").at("pass").get<bool>());
}

TEST(Json, Summary) {
  ExperimentConfig c;
  c.T = 64;
  const Json j = summarize(run_experiment(c).run);
  EXPECT_EQ(j.at("mode"), "smooth");
  EXPECT_EQ(j.at("T"), 64);
}
