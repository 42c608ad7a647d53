#pragma once

#include "starmd/dgf.hpp"
#include "starmd/linesearch.hpp"
#include "starmd/objectives.hpp"

#include <optional>
#include <string>
#include <vector>

namespace starmd {

enum class Mode { General, Smooth };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& text);

/// One iteration's step sizes and search parameters. A_t is the coefficient
/// of the gap in the per-iteration inequality, B_t its additive residual.
struct ScheduleEntry {
  double alpha_t = 0.0;
  double eta_t = 0.0;
  double C_t = 0.0;
  double eps_t = 0.0;
  double A_t = 0.0;
  double B_t = 0.0;
  /// C_t was negative and has been raised to 0.
  bool clamped = false;
};

struct ScheduleConstants {
  double r;
  double M;
  double beta;
};

/// r = (q - kappa)/kappa, M = (r/q)^r, beta = q - kappa + (q - kappa)/q.
ScheduleConstants schedule_constants(double q, double kappa);

/// Polynomial tuning for 1 < kappa < q:
/// alpha_t = (tau (q - beta))^(q - kappa) alpha / t^beta,
/// eta_t = alpha_t (t / (tau (q - beta)))^(q - 1),
/// C_t = A_t/eta_t - 1/tau, eps_t = B_t/eta_t.
ScheduleEntry schedule_general(double q, double kappa, double tau, double mu,
                               double L, double alpha, int t);

/// q = kappa = 2: alpha_t = alpha, eta_t = alpha t / (2 tau),
/// eps_t = 1/(t eta_t). A_t is mu eta_t^2 / (alpha (2 mu - L alpha)), which
/// equals eta_t^2 / alpha at alpha = mu/L. Needs alpha < 2 mu / L.
ScheduleEntry schedule_smooth(double tau, double mu, double L, double alpha,
                              int t);

/// (mu / L) ((q - kappa) B / kappa)^((q - kappa)/q).
double alpha_from_radius(double B, double mu, double L, double q, double kappa);

struct SolverOptions {
  Mode mode = Mode::General;
  int T = 0;
  /// Base step coefficient. When absent it is derived from B; when both are
  /// absent, B = D_psi(x*, x_1)/mu for problems with a known minimizer and
  /// alpha = mu/L otherwise.
  std::optional<double> alpha;
  std::optional<double> B;
  /// Extra probes allowed beyond probe_bound before BudgetExceeded.
  int probe_slack = 16;
};

struct TraceRow {
  int t = 0;
  double lambda = 0.0;
  int probes = 0;
  std::uint64_t value_calls = 0;
  std::uint64_t grad_calls = 0;
  /// F(x^ag_{t+1}) - F*.
  std::optional<double> gap;
  /// max distance of x_t, x^ag_t, x^md_t to the minimizer.
  std::optional<double> R;
  double C_t = 0.0;
  double eps_t = 0.0;
  double eta_t = 0.0;
  double alpha_t = 0.0;
  double A_t = 0.0;
  double B_t = 0.0;
  bool C_clamped = false;
  /// |x_t - x^ag_t| and the search budget it implies.
  double dist = 0.0;
  int probe_bound = 0;
  double search_value = 0.0;
  /// Both sides of A_t gap_{t+1} <= D(x*, x_t) - D(x*, x_{t+1}) + eta_t eps_t
  /// + A_{t-1} gap_t + B_t, and whether it held to 1e-8 relative.
  std::optional<double> telescope_lhs;
  std::optional<double> telescope_rhs;
  std::optional<bool> telescope_ok;
};

struct RunResult {
  Mode mode = Mode::General;
  double alpha = 0.0;
  std::vector<TraceRow> rows;
  std::optional<double> initial_gap;
  Vector x;
  Vector x_ag;
  OracleCounter calls;
  std::uint64_t diagnostic_calls = 0;
};

/// Accelerated mirror descent with binary search, started at x_1 = x^ag_1.
/// Throws BudgetExceeded from the search and CertificationMismatch when an
/// independent re-evaluation of the search condition disagrees.
RunResult run(const Problem& problem, const Geometry& geom, VectorRef x1,
              const SolverOptions& options);

struct RadiusCheck {
  bool pass = false;
  /// Minimal K^n1 and n2 with max{(q L eta_t/kappa)^(1/(q-1)),
  /// (L alpha_t/kappa)^(1/(q-1))} <= K^n1 t^n2.
  double k_pow = 0.0;
  double n2 = 0.0;
  double exponent = 0.0;
  double c = 0.0;
  /// Largest R_t / (c K^(n1 (q-1)/(q-kappa)) t^exponent).
  double worst_ratio = 0.0;
};

/// R_t <= c K^(n1 (q-1)/(q-kappa)) t^((q-1)(n2+1)/(q-kappa)) with c fixed by
/// t = 1. Rows without R are skipped.
RadiusCheck radius_bound_check(const std::vector<TraceRow>& rows, double k_pow,
                               double n2, double q, double kappa);
/// Same check with (K^n1, n2) fitted from the rows' schedule.
RadiusCheck radius_bound_check(const std::vector<TraceRow>& rows, double L,
                               double q, double kappa);

}  // namespace starmd
