#pragma once

#include "starmd/adversary.hpp"
#include "starmd/dgf.hpp"
#include "starmd/objectives.hpp"
#include "starmd/solver.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace starmd {

using Json = nlohmann::json;

/// One solver run. `norm` overrides the problem's own norm as geometry;
/// `l1_s` treats the declared smoothness as measured in l1 and runs in the
/// l_(1+s) geometry with L inflated accordingly.
struct ExperimentConfig {
  std::string problem = "quad";
  Index dim = 50;
  std::optional<NormSpec> norm;
  Mode mode = Mode::Smooth;
  int T = 256;
  std::optional<double> alpha;
  std::optional<double> B;
  std::uint64_t seed = 1;
  std::optional<double> l1_s;
  std::string out;
};

Json to_json(const NormSpec& spec);
NormSpec norm_from_json(const Json& j);
Json to_json(const ExperimentConfig& config);
/// Missing keys keep the values already in `base`.
ExperimentConfig config_from_json(const Json& j, ExperimentConfig base = {});

struct PreparedExperiment {
  CatalogEntry entry;
  Geometry geometry;
  SolverOptions options;
};

/// Builds the problem and geometry and checks the mode against (q, kappa).
PreparedExperiment prepare(const ExperimentConfig& config);

struct ExperimentResult {
  Problem problem;
  RunResult run;
  double seconds = 0.0;
};

/// Runs the solver and writes the CSV trace to config.out when set.
ExperimentResult run_experiment(const ExperimentConfig& config);

inline constexpr const char* kTraceHeader =
    "t,lambda,probes,value_calls,grad_calls,gap,R,C_t,eps_t,eta_t,alpha_t";

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows);
void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows);

struct GapSeries {
  std::vector<double> t;
  std::vector<double> gap;
};

/// Reads (t, gap) from a trace CSV, skipping rows with an empty gap.
GapSeries read_gap_series(std::istream& in);
GapSeries gap_series(const std::vector<TraceRow>& rows);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  /// Root mean square residual of the log-log fit.
  double residual = 0.0;
  /// Points whose gap was <= 0 and got clamped to 1e-300.
  int clamped = 0;
  int points = 0;
};

/// Least squares of log gap on log t over t in [H/2, H], H = horizon or the
/// last t. Needs at least 64 points in the series.
RateFit fit_rate(const GapSeries& series, std::optional<double> horizon = {});
RateFit fit_rate(const std::vector<TraceRow>& rows,
                 std::optional<double> horizon = {});

/// Last t with a strictly positive gap, or 0.
int last_positive_gap(const std::vector<TraceRow>& rows);

struct L1Reduction {
  Geometry geometry;
  double inflation;
};

/// l_(1+s) geometry and the factor d^(kappa s/(s+1)) by which an l1
/// smoothness constant grows when measured in that norm.
L1Reduction l1_reduction(Index d, double s, double kappa);

/// Plain mirror descent x_{t+1} = mirror_step(x_t, grad F(x_t), eta), with
/// eta = mu / L by default. Rows carry t, counters, gap and eta_t.
RunResult baseline_mirror_descent(const Problem& problem, const Geometry& geom,
                                  VectorRef x1, int T,
                                  std::optional<double> eta = {});

Json summarize(const RunResult& run);
Json to_json(const GameReport& game);

}  // namespace starmd
