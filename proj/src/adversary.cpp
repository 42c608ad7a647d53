#include "starmd/adversary.hpp"

#include "starmd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace starmd {

namespace {

constexpr double kRelTol = 1e-12;
// g2'(mid) = K Bp on the right half. K = 5/3 is the least value keeping
// C g2 + x g2' >= eps there, and it holds the potential to 5x per query.
constexpr double kK = 5.0 / 3.0;

double quad_value(double g0, double d0, double s, double h) {
  return g0 + h * (d0 + 0.5 * s * h);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw PreconditionViolation(what);
}

void check_common(double a, double b, double A, double B, double Bp,
                  double Lstar, double C, double eps) {
  require(std::isfinite(a) && std::isfinite(b) && a < b,
          "construction needs a finite interval a < b");
  require(Lstar > 0.0 && C > 0.0 && eps > 0.0,
          "construction needs positive Lstar, C and eps");
  require(std::isfinite(A) && std::isfinite(B) && std::isfinite(Bp),
          "construction needs finite boundary data");
  require(Bp >= 0.0, "construction needs g'(b) >= 0");
  require(A >= B, "construction needs g(a) >= g(b)");
}

}  // namespace

PiecewiseDerivative::PiecewiseDerivative(std::vector<double> knots,
                                         std::vector<double> derivs,
                                         double value_at_first)
    : knots_(std::move(knots)), derivs_(std::move(derivs)) {
  if (knots_.size() < 2 || knots_.size() != derivs_.size()) {
    throw std::invalid_argument(
        "piecewise derivative needs matching knots and values, at least two");
  }
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (!std::isfinite(knots_[i]) || !std::isfinite(derivs_[i])) {
      throw NonFiniteInput("piecewise derivative has non-finite data");
    }
    if (i > 0 && knots_[i] < knots_[i - 1]) {
      throw std::invalid_argument("piecewise derivative knots must not decrease");
    }
  }
  values_.resize(knots_.size());
  values_[0] = value_at_first;
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    const double h = knots_[i] - knots_[i - 1];
    values_[i] = values_[i - 1] + 0.5 * h * (derivs_[i - 1] + derivs_[i]);
  }
}

std::size_t PiecewiseDerivative::piece(double x) const {
  if (x < lo() || x > hi()) {
    std::ostringstream msg;
    msg << "point " << x << " outside [" << lo() << ", " << hi() << "]";
    throw std::out_of_range(msg.str());
  }
  auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  std::size_t i = it == knots_.begin() ? 0 : std::size_t(it - knots_.begin()) - 1;
  if (i + 1 >= knots_.size()) i = knots_.size() - 2;
  return i;
}

double PiecewiseDerivative::derivative(double x) const {
  const std::size_t i = piece(x);
  const double h = knots_[i + 1] - knots_[i];
  if (h == 0.0) return derivs_[i + 1];
  const double t = (x - knots_[i]) / h;
  return derivs_[i] + t * (derivs_[i + 1] - derivs_[i]);
}

double PiecewiseDerivative::value(double x) const {
  const std::size_t i = piece(x);
  const double h = knots_[i + 1] - knots_[i];
  if (h == 0.0) return values_[i + 1];
  const double s = (derivs_[i + 1] - derivs_[i]) / h;
  return quad_value(values_[i], derivs_[i], s, x - knots_[i]);
}

double PiecewiseDerivative::max_abs_slope() const {
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    const double h = knots_[i + 1] - knots_[i];
    if (h > 0.0) worst = std::max(worst, std::abs(derivs_[i + 1] - derivs_[i]) / h);
  }
  return worst;
}

double PiecewiseDerivative::min_condition(double C, double from,
                                          double to) const {
  double best = std::numeric_limits<double>::infinity();
  const double lo_x = std::max(from, lo());
  const double hi_x = std::min(to, hi());
  if (lo_x > hi_x) return best;
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    const double x0 = knots_[i];
    const double h = knots_[i + 1] - x0;
    const double u = std::max(lo_x, x0);
    const double v = std::min(hi_x, knots_[i + 1]);
    if (u > v) continue;
    const double s = h > 0.0 ? (derivs_[i + 1] - derivs_[i]) / h : 0.0;
    const double g0 = values_[i];
    const double d0 = derivs_[i];
    auto cond = [&](double x) {
      const double dx = x - x0;
      return C * quad_value(g0, d0, s, dx) + x * (d0 + s * dx);
    };
    best = std::min({best, cond(u), cond(v)});
    // C g + x g' is quadratic on the piece; its derivative vanishes at
    // (C + 1)(d0 + s (x - x0)) + s x = 0.
    if (s != 0.0) {
      const double x_star = (C + 1.0) * (s * x0 - d0) / (s * (C + 2.0));
      if (x_star > u && x_star < v) best = std::min(best, cond(x_star));
    }
  }
  return best;
}

double phi_potential(double a, double b, double A, double B, double Bp,
                     double Lstar) {
  const double w = b - a;
  return 56.0 * Bp / (Lstar * w) + 32.0 * (A - B) / (Lstar * w * w);
}

double phi_potential(const AdversaryState& s) {
  return phi_potential(s.a, s.b, s.A, s.B, s.Bp, s.Lstar);
}

AdversaryState adversary_init(double C, double eps, double Lstar) {
  if (!(C > 0.0 && eps > 0.0 && Lstar > 0.0) || !std::isfinite(C) ||
      !std::isfinite(eps) || !std::isfinite(Lstar)) {
    throw std::invalid_argument("adversary needs positive finite C, eps, Lstar");
  }
  AdversaryState s;
  s.C = C;
  s.eps = eps;
  s.Lstar = Lstar;
  s.C_star = 1.0 + 1.0 / C;
  s.a = 1.0 / s.C_star;
  s.b = 1.0;
  s.A = eps / C;
  s.B = 0.0;
  s.Bp = s.C_star * eps;
  s.phi_history.push_back(phi_potential(s));
  return s;
}

Answer adversary_answer(AdversaryState& s, double lambda) {
  if (!std::isfinite(lambda) || lambda < 0.0 || lambda > 1.0) {
    throw std::invalid_argument("adversary query must lie in [0, 1]");
  }
  Answer ans{};
  bool live = false;
  if (lambda < s.a) {
    ans = {s.A, 0.0};
  } else if (lambda > s.b) {
    // Committed pieces are stored newest (leftmost) last; walk from b right.
    double g = s.B;
    double x = s.b;
    for (auto it = s.committed.rbegin(); it != s.committed.rend(); ++it) {
      const double h = it->hi - it->lo;
      const double slope = h > 0.0 ? (it->d_hi - it->d_lo) / h : 0.0;
      if (lambda <= it->hi) {
        const double dx = lambda - x;
        ans = {quad_value(g, it->d_lo, slope, dx), it->d_lo + slope * dx};
        break;
      }
      g = quad_value(g, it->d_lo, slope, h);
      x = it->hi;
    }
  } else {
    live = true;
    const double w = s.b - s.a;
    const double mid = s.a + 0.5 * w;
    if (lambda <= mid) {
      ans = {s.A, 0.0};
      s.a = lambda;
    } else {
      const double r = s.b - lambda;
      const double gp = s.Bp * (1.0 + 2.0 * (kK - 1.0) * r / w);
      const double g = s.B - s.Bp * (1.0 + (kK - 1.0) * r / w) * r;
      if (r > 0.0) s.committed.push_back({lambda, s.b, gp, s.Bp});
      ans = {g, gp};
      s.b = lambda;
      s.B = g;
      s.Bp = gp;
    }
  }
  s.queries.push_back({lambda, ans.g, ans.g_prime, live});
  s.phi_history.push_back(phi_potential(s));
  return ans;
}

PiecewiseDerivative construct_g1(double a, double b, double A, double B,
                                 double Bp, double Lstar, double C,
                                 double eps) {
  check_common(a, b, A, B, Bp, Lstar, C, eps);
  const double w = b - a;
  require(A >= (eps / C) * (1.0 - kRelTol), "g1 needs C g(a) >= eps");
  require(w >= (6.0 * Bp / Lstar + 16.0 * (A - B) / (Lstar * w)) * (1.0 - kRelTol),
          "g1 needs b - a >= 6 Bp/L + 16 (A - B)/(L (b - a))");
  const double W = 0.5 * Bp + 4.0 * (A - B) / w;
  return PiecewiseDerivative({a, a + 0.5 * w, a + 0.75 * w, b},
                             {0.0, 0.0, -W, Bp}, A);
}

PiecewiseDerivative construct_g2(double a, double b, double A, double B,
                                 double Bp, double Lstar, double C,
                                 double eps) {
  check_common(a, b, A, B, Bp, Lstar, C, eps);
  const double w = b - a;
  const double C_star = 1.0 + 1.0 / C;
  require(a >= (1.0 / C_star) * (1.0 - kRelTol) && b <= 1.0,
          "g2 needs [a, b] inside [1/C*, 1]");
  require(B <= 0.0, "g2 needs g(b) <= 0");
  require(C * B + Bp / C_star >= eps * (1.0 - kRelTol),
          "g2 needs C g(b) + g'(b)/C* >= eps");
  require(w >= (56.0 * Bp / Lstar + 32.0 * (A - B) / (Lstar * w)) * (1.0 - kRelTol),
          "g2 needs b - a >= 56 Bp/L + 32 (A - B)/(L (b - a))");
  const double W = 0.5 * (3.0 * kK + 2.0) * Bp + 4.0 * (A - B) / w;
  return PiecewiseDerivative({a, a + 0.25 * w, a + 0.5 * w, b},
                             {0.0, -W, kK * Bp, Bp}, A);
}

PiecewiseDerivative extend_to_unit(const AdversaryState& s,
                                   const PiecewiseDerivative& inner) {
  std::vector<double> knots{0.0};
  std::vector<double> derivs{0.0};
  for (std::size_t i = 0; i < inner.knots().size(); ++i) {
    knots.push_back(inner.knots()[i]);
    derivs.push_back(inner.derivs()[i]);
  }
  for (auto it = s.committed.rbegin(); it != s.committed.rend(); ++it) {
    knots.push_back(it->hi);
    derivs.push_back(it->d_hi);
  }
  if (knots.back() < 1.0) {
    knots.push_back(1.0);
    derivs.push_back(derivs.back());
  }
  return PiecewiseDerivative(std::move(knots), std::move(derivs),
                             inner.value_at_first());
}

CounterexampleReport verify_counterexample(const AdversaryState& s,
                                           const PiecewiseDerivative& g1,
                                           const PiecewiseDerivative& g2) {
  CounterexampleReport r;
  std::ostringstream why;
  if (g1.lo() > 0.0 || g1.hi() < 1.0 || g2.lo() > 0.0 || g2.hi() < 1.0) {
    r.detail = "counterexamples must cover [0, 1]";
    return r;
  }
  for (const auto& q : s.queries) {
    for (const auto* g : {&g1, &g2}) {
      r.max_interp_error = std::max({r.max_interp_error,
                                     std::abs(g->value(q.lambda) - q.g),
                                     std::abs(g->derivative(q.lambda) - q.g_prime)});
    }
  }
  r.interpolates = r.max_interp_error <= 1e-10;
  if (!r.interpolates) why << "query mismatch " << r.max_interp_error << "; ";

  r.max_slope = std::max(g1.max_abs_slope(), g2.max_abs_slope());
  r.smooth = r.max_slope <= s.Lstar * (1.0 + kRelTol);
  if (!r.smooth) why << "slope " << r.max_slope << " > " << s.Lstar << "; ";

  const double mid = s.a + 0.5 * (s.b - s.a);
  const double floor = s.eps * (1.0 - kRelTol);
  r.g1_left_min = g1.min_condition(s.C, 0.0, mid);
  r.g2_right_min = g2.min_condition(s.C, mid, 1.0);
  r.g1_fails_left = r.g1_left_min >= floor;
  r.g2_fails_right = r.g2_right_min >= floor;
  if (!r.g1_fails_left) why << "g1 stops left of mid; ";
  if (!r.g2_fails_right) why << "g2 stops right of mid; ";

  // g1 may stop only inside (mid, b) and g2 only inside (a, mid).
  const double g1_right = g1.min_condition(s.C, s.b, 1.0);
  const double g2_left = g2.min_condition(s.C, 0.0, s.a);
  r.disjoint = r.g1_fails_left && r.g2_fails_right && g1_right >= floor &&
               g2_left >= floor;
  if (!r.disjoint) why << "stopping sets overlap; ";

  r.pass = r.interpolates && r.smooth && r.disjoint;
  r.detail = r.pass ? "ok" : why.str();
  return r;
}

std::string to_string(QueryStrategy s) {
  return s == QueryStrategy::Bisection ? "bisection" : "grid";
}

QueryStrategy parse_strategy(const std::string& text) {
  if (text == "bisection") return QueryStrategy::Bisection;
  if (text == "grid") return QueryStrategy::Grid;
  throw std::invalid_argument("unknown query strategy '" + text + "'");
}

double query_budget(double C, double eps, double Lstar) {
  return std::log(C * Lstar / (88.0 * eps * (C + 1.0) * (C + 1.0))) /
         std::log(5.0);
}

GameReport run_adversary_game(double C, double eps, double Lstar,
                              QueryStrategy strategy, int N) {
  if (N < 0) throw std::invalid_argument("query count must be >= 0");
  GameReport rep;
  rep.C = C;
  rep.eps = eps;
  rep.Lstar = Lstar;
  rep.strategy = strategy;
  rep.N = N;
  rep.query_budget = query_budget(C, eps, Lstar);
  rep.state = adversary_init(C, eps, Lstar);

  double lo = 0.0;
  double hi = 1.0;
  for (int i = 1; i <= N; ++i) {
    double lambda = 0.0;
    if (strategy == QueryStrategy::Bisection) {
      lambda = 0.5 * (lo + hi);
    } else {
      lambda = double(i) / double(N + 1);
    }
    const Answer ans = adversary_answer(rep.state, lambda);
    if (ans.g > 0.0) {
      lo = lambda;
    } else {
      hi = lambda;
    }
  }

  rep.phi_growth_ok = true;
  const auto& phi = rep.state.phi_history;
  for (std::size_t i = 1; i < phi.size(); ++i) {
    if (phi[i] > 5.0 * phi[i - 1] * (1.0 + 1e-9)) rep.phi_growth_ok = false;
  }

  const auto& s = rep.state;
  try {
    rep.g1 = extend_to_unit(s, construct_g1(s.a, s.b, s.A, s.B, s.Bp, Lstar, C, eps));
    rep.g2 = extend_to_unit(s, construct_g2(s.a, s.b, s.A, s.B, s.Bp, Lstar, C, eps));
    rep.constructed = true;
    rep.verdict = verify_counterexample(s, rep.g1, rep.g2);
  } catch (const PreconditionViolation& e) {
    rep.verdict.detail = e.what();
  }
  return rep;
}

}  // namespace starmd
