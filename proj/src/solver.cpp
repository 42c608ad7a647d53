#include "starmd/solver.hpp"

#include "starmd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace starmd {

std::string to_string(Mode mode) {
  return mode == Mode::General ? "general" : "smooth";
}

Mode parse_mode(const std::string& text) {
  if (text == "general") return Mode::General;
  if (text == "smooth") return Mode::Smooth;
  throw std::invalid_argument("mode must be 'general' or 'smooth', got '" + text + "'");
}

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " must be positive and finite");
  }
}

}  // namespace

ScheduleConstants schedule_constants(double q, double kappa) {
  const double r = (q - kappa) / kappa;
  return {r, std::pow(r / q, r), q - kappa + (q - kappa) / q};
}

ScheduleEntry schedule_general(double q, double kappa, double tau, double mu,
                               double L, double alpha, int t) {
  if (!(kappa > 1.0)) throw std::invalid_argument("general schedule needs kappa > 1");
  if (!(kappa < q)) {
    throw std::invalid_argument("general schedule needs kappa < q; use the smooth schedule for q = kappa = 2");
  }
  require_positive(tau, "tau");
  require_positive(mu, "mu");
  require_positive(L, "L");
  require_positive(alpha, "alpha");
  if (t < 1) throw std::invalid_argument("iteration index starts at 1");

  const auto [r, M, beta] = schedule_constants(q, kappa);
  const double qb = q - beta;
  const double qs = q / (q - 1.0);
  const double td = static_cast<double>(t);

  ScheduleEntry s;
  s.alpha_t = std::pow(tau * qb, q - kappa) * alpha / std::pow(td, beta);
  s.eta_t = s.alpha_t * std::pow(td / (tau * qb), q - 1.0);
  s.A_t = std::pow(s.eta_t, qs) / std::pow(s.alpha_t, qs - 1.0);
  const double ml = std::pow(M / mu, 1.0 / r) * std::pow(L, 1.0 + 1.0 / r);
  s.B_t = std::pow(s.eta_t, qs) / std::pow(s.alpha_t, qs - 1.0 - 1.0 / r) * ml;
  s.eps_t = std::pow(alpha, q / (q - kappa)) * ml / (td * s.eta_t);
  const double c = (td / qb - 1.0) / tau;
  s.clamped = c < 0.0;
  s.C_t = std::max(c, 0.0);
  return s;
}

ScheduleEntry schedule_smooth(double tau, double mu, double L, double alpha, int t) {
  require_positive(tau, "tau");
  require_positive(mu, "mu");
  require_positive(L, "L");
  require_positive(alpha, "alpha");
  if (!(alpha < 2.0 * mu / L)) {
    throw std::invalid_argument("smooth schedule needs alpha < 2 mu / L");
  }
  if (t < 1) throw std::invalid_argument("iteration index starts at 1");

  ScheduleEntry s;
  s.alpha_t = alpha;
  s.eta_t = alpha * t / (2.0 * tau);
  s.eps_t = 1.0 / (t * s.eta_t);
  s.A_t = mu * s.eta_t * s.eta_t / (alpha * (2.0 * mu - L * alpha));
  s.B_t = 0.0;
  const double c = s.A_t / s.eta_t - 1.0 / tau;
  s.clamped = c < 0.0;
  s.C_t = std::max(c, 0.0);
  return s;
}

double alpha_from_radius(double B, double mu, double L, double q, double kappa) {
  require_positive(B, "B");
  require_positive(mu, "mu");
  require_positive(L, "L");
  if (!(kappa < q)) throw std::invalid_argument("alpha_from_radius needs kappa < q");
  return mu / L * std::pow((q - kappa) * B / kappa, (q - kappa) / q);
}

RunResult run(const Problem& problem, const Geometry& geom, VectorRef x1,
              const SolverOptions& options) {
  if (options.T < 0) throw std::invalid_argument("T must be >= 0");
  if (x1.size() != problem.dim) {
    throw DimensionMismatch("start point has dimension " + std::to_string(x1.size()) +
                            ", problem expects " + std::to_string(problem.dim));
  }
  require_finite(x1, "start point");
  const double q = geom.q();
  const double mu = geom.mu();
  const double kappa = problem.kappa;
  if (options.mode == Mode::General && !(kappa < q)) {
    throw std::invalid_argument("general mode needs kappa < q (kappa = " +
                                std::to_string(kappa) + ", q = " + std::to_string(q) + ")");
  }
  if (options.mode == Mode::Smooth && !(kappa == 2.0 && q == 2.0)) {
    throw std::invalid_argument("smooth mode needs kappa = q = 2");
  }

  const bool known = problem.minimizer.has_value();
  double alpha = 0.0;
  if (options.alpha) {
    alpha = *options.alpha;
  } else {
    std::optional<double> B = options.B;
    if (!B && known) {
      const double b = geom.bregman(*problem.minimizer, x1) / mu;
      if (b > 0.0) B = b;
    }
    if (!B) {
      alpha = mu / problem.L;
    } else if (options.mode == Mode::General) {
      alpha = alpha_from_radius(*B, mu, problem.L, q, kappa);
    } else if (options.B) {
      alpha = mu * *B / problem.L;
    } else {
      alpha = mu / problem.L;
    }
  }
  require_positive(alpha, "alpha");

  auto schedule = [&](int t) {
    return options.mode == Mode::General
               ? schedule_general(q, kappa, problem.tau, mu, problem.L, alpha, t)
               : schedule_smooth(problem.tau, mu, problem.L, alpha, t);
  };

  Oracle oracle(problem);
  RunResult out;
  out.mode = options.mode;
  out.alpha = alpha;
  out.rows.reserve(static_cast<std::size_t>(options.T));

  Vector x = x1;
  Vector x_ag = x1;
  const std::optional<double> f_star = problem.f_star;
  std::optional<double> gap_prev;
  if (f_star) gap_prev = oracle.peek_value(x_ag) - *f_star;
  out.initial_gap = gap_prev;
  double A_prev = 0.0;

  for (int t = 1; t <= options.T; ++t) {
    const ScheduleEntry s = schedule(t);
    TraceRow row;
    row.t = t;
    row.C_t = s.C_t;
    row.eps_t = s.eps_t;
    row.eta_t = s.eta_t;
    row.alpha_t = s.alpha_t;
    row.A_t = s.A_t;
    row.B_t = s.B_t;
    row.C_clamped = s.clamped;
    row.dist = norm(geom.norm(), x - x_ag);
    row.probe_bound = probe_bound(s.C_t, problem.L, kappa, row.dist, s.eps_t);

    SearchResult found = binary_search(oracle, x, x_ag, s.C_t, s.eps_t,
                                       row.probe_bound + options.probe_slack);
    row.lambda = found.lambda;
    row.probes = found.probes;
    row.search_value = found.satisfied_value;
    const Vector grad = found.grad_md ? *found.grad_md : oracle.gradient(found.x_md);

    // Independent re-check of <grad F(x_md), x_md - x_t> + C_t (F(x_md) - F(x_ag)) <= eps_t.
    const double f_md = oracle.peek_value(found.x_md);
    const double f_ag = oracle.peek_value(x_ag);
    const double lin = oracle.peek_gradient(found.x_md).dot(found.x_md - x);
    const double check = lin + s.C_t * (f_md - f_ag);
    const double slack = 1e-12 * (std::abs(lin) + s.C_t * (std::abs(f_md) + std::abs(f_ag)));
    if (!(check <= s.eps_t + slack)) {
      throw CertificationMismatch("iteration " + std::to_string(t) +
                                  ": search condition re-check gives " +
                                  std::to_string(check) + " > eps_t = " +
                                  std::to_string(s.eps_t));
    }

    Vector x_next = mirror_step(geom, x, grad, s.eta_t);
    Vector ag_next = prox_step(geom, found.x_md, grad, s.alpha_t);

    if (known) {
      const Vector& xs = *problem.minimizer;
      const auto& nrm = geom.norm();
      row.R = std::max({norm(nrm, x - xs), norm(nrm, x_ag - xs), norm(nrm, found.x_md - xs)});
    }
    if (f_star) {
      const double gap = oracle.peek_value(ag_next) - *f_star;
      row.gap = gap;
      if (known) {
        const Vector& xs = *problem.minimizer;
        const double d_now = geom.bregman(xs, x);
        const double d_next = geom.bregman(xs, x_next);
        const double lhs = s.A_t * gap;
        const double rhs = d_now - d_next + s.eta_t * s.eps_t + A_prev * *gap_prev + s.B_t;
        const double scale = std::abs(lhs) + d_now + d_next + s.eta_t * s.eps_t +
                             std::abs(A_prev * *gap_prev) + s.B_t;
        row.telescope_lhs = lhs;
        row.telescope_rhs = rhs;
        row.telescope_ok = lhs - rhs <= 1e-8 * scale;
      }
      gap_prev = gap;
    }
    A_prev = s.A_t;

    x = std::move(x_next);
    x_ag = std::move(ag_next);
    row.value_calls = oracle.counter().value_calls;
    row.grad_calls = oracle.counter().grad_calls;
    out.rows.push_back(row);
  }

  out.x = std::move(x);
  out.x_ag = std::move(x_ag);
  out.calls = oracle.counter();
  out.diagnostic_calls = oracle.diagnostic_calls();
  return out;
}

RadiusCheck radius_bound_check(const std::vector<TraceRow>& rows, double k_pow,
                               double n2, double q, double kappa) {
  if (!(kappa < q)) throw std::invalid_argument("radius check needs kappa < q");
  RadiusCheck out;
  out.k_pow = k_pow;
  out.n2 = n2;
  out.exponent = (q - 1.0) * (n2 + 1.0) / (q - kappa);
  const double scale = std::pow(k_pow, (q - 1.0) / (q - kappa));
  auto bound = [&](int t) { return scale * std::pow(static_cast<double>(t), out.exponent); };

  const TraceRow* first = nullptr;
  for (const auto& row : rows) {
    if (row.R) {
      first = &row;
      break;
    }
  }
  if (first == nullptr) {
    out.pass = true;
    return out;
  }
  out.c = std::max(*first->R, std::numeric_limits<double>::min()) / bound(first->t);
  out.pass = true;
  for (const auto& row : rows) {
    if (!row.R) continue;
    const double ratio = *row.R / (out.c * bound(row.t));
    out.worst_ratio = std::max(out.worst_ratio, ratio);
    if (ratio > 1.0 + 1e-9) out.pass = false;
  }
  return out;
}

RadiusCheck radius_bound_check(const std::vector<TraceRow>& rows, double L,
                               double q, double kappa) {
  std::vector<std::pair<double, double>> m;
  m.reserve(rows.size());
  for (const auto& row : rows) {
    const double a = std::pow(q * L * row.eta_t / kappa, 1.0 / (q - 1.0));
    const double b = std::pow(L * row.alpha_t / kappa, 1.0 / (q - 1.0));
    m.emplace_back(static_cast<double>(row.t), std::max(a, b));
  }
  double n2 = 0.0;
  double k_pow = 0.0;
  if (!m.empty()) {
    const auto [t1, m1] = m.front();
    for (const auto& [t, mt] : m) {
      if (t > t1) n2 = std::max(n2, std::log(mt / m1) / std::log(t / t1));
    }
    for (const auto& [t, mt] : m) k_pow = std::max(k_pow, mt / std::pow(t, n2));
  }
  return radius_bound_check(rows, k_pow, n2, q, kappa);
}

}  // namespace starmd
