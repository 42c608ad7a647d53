#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace starmd {

/// g on an interval, stored through its derivative: g' is linear between
/// consecutive knots and g is its exact integral from value_at_first.
class PiecewiseDerivative {
 public:
  PiecewiseDerivative() = default;
  /// Knots must be non-decreasing; zero-length pieces are allowed.
  PiecewiseDerivative(std::vector<double> knots, std::vector<double> derivs,
                      double value_at_first);

  double lo() const { return knots_.front(); }
  double hi() const { return knots_.back(); }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& derivs() const { return derivs_; }
  double value_at_first() const { return values_.front(); }

  double value(double x) const;
  double derivative(double x) const;
  /// Largest |slope| of g' over all pieces of positive length.
  double max_abs_slope() const;
  /// Exact minimum of C g(x) + x g'(x) over [from, to] intersected with the
  /// domain; +inf when the intersection is empty.
  double min_condition(double C, double from, double to) const;

 private:
  std::size_t piece(double x) const;

  std::vector<double> knots_;
  std::vector<double> derivs_;
  std::vector<double> values_;
};

struct Query {
  double lambda;
  double g;
  double g_prime;
  /// Whether the query fell in the live interval and moved it.
  bool live;
};

/// Committed stretch right of the live interval with linear g'.
struct CommittedPiece {
  double lo;
  double hi;
  double d_lo;
  double d_hi;
};

/// Live interval [a, b] with g(a) = A, g'(a) = 0, g(b) = B, g'(b) = Bp.
struct AdversaryState {
  double C = 1.0;
  double eps = 0.0;
  double Lstar = 1.0;
  double C_star = 2.0;
  double a = 0.5;
  double b = 1.0;
  double A = 0.0;
  double B = 0.0;
  double Bp = 0.0;
  std::vector<Query> queries;
  /// Ordered right to left, newest last.
  std::vector<CommittedPiece> committed;
  /// Potential after init and after every query.
  std::vector<double> phi_history;
};

double phi_potential(double a, double b, double A, double B, double Bp,
                     double Lstar);
double phi_potential(const AdversaryState& state);

AdversaryState adversary_init(double C, double eps, double Lstar);

struct Answer {
  double g;
  double g_prime;
};

/// Left half of [a, b]: (A, 0) and the interval becomes [lambda, b]. Right
/// half: values of a linear g' through (b, Bp) with slope -(4/3) Bp/(b - a);
/// the interval becomes [a, lambda] and [lambda, b] is committed. Queries
/// outside [a, b] are answered from the flat stretch left of a or from the
/// committed pieces and leave the state unchanged.
Answer adversary_answer(AdversaryState& state, double lambda);

/// Flat on [a, mid], dips to -W at a + 3(b - a)/4, rises to Bp at b.
PiecewiseDerivative construct_g1(double a, double b, double A, double B,
                                 double Bp, double Lstar, double C, double eps);
/// Dips to -W at a + (b - a)/4, reaches (5/3) Bp at mid, linear down to Bp
/// at b.
PiecewiseDerivative construct_g2(double a, double b, double A, double B,
                                 double Bp, double Lstar, double C, double eps);

/// Extends a construction on the live interval to [0, 1] with the flat
/// stretch g = A on [0, a] and the committed pieces on [b, 1].
PiecewiseDerivative extend_to_unit(const AdversaryState& state,
                                   const PiecewiseDerivative& inner);

struct CounterexampleReport {
  bool pass = false;
  bool interpolates = false;
  bool smooth = false;
  bool g1_fails_left = false;
  bool g2_fails_right = false;
  bool disjoint = false;
  double max_interp_error = 0.0;
  double max_slope = 0.0;
  /// min of C g + x g' for g1 on [0, mid] and for g2 on [mid, 1].
  double g1_left_min = 0.0;
  double g2_right_min = 0.0;
  std::string detail;
};

/// Checks two functions on [0, 1]: both reproduce every logged query to
/// 1e-10, have g' slopes <= Lstar, g1 has C g + x g' >= eps outside
/// (mid, b) and g2 outside (a, mid), so the sets where either may stop do not
/// meet.
CounterexampleReport verify_counterexample(const AdversaryState& state,
                                           const PiecewiseDerivative& g1,
                                           const PiecewiseDerivative& g2);

enum class QueryStrategy { Bisection, Grid };

std::string to_string(QueryStrategy s);
QueryStrategy parse_strategy(const std::string& text);

struct GameReport {
  double C = 0.0;
  double eps = 0.0;
  double Lstar = 0.0;
  QueryStrategy strategy = QueryStrategy::Bisection;
  int N = 0;
  /// log_5(C Lstar / (88 eps (C + 1)^2)).
  double query_budget = 0.0;
  AdversaryState state;
  /// Every step satisfied phi_new <= 5 phi_old (1 + 1e-9).
  bool phi_growth_ok = false;
  bool constructed = false;
  PiecewiseDerivative g1;
  PiecewiseDerivative g2;
  CounterexampleReport verdict;
};

double query_budget(double C, double eps, double Lstar);

/// Plays N queries of the given strategy, then builds and verifies g1, g2.
/// Bisection queries midpoints of its own bracket, moving right when g > 0.
/// Grid queries i / (N + 1).
GameReport run_adversary_game(double C, double eps, double Lstar,
                              QueryStrategy strategy, int N);

}  // namespace starmd
