#include "starmd/adversary.hpp"
#include "starmd/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace starmd;

namespace {

double grid_min_condition(const PiecewiseDerivative& g, double C, double from, double to,
                          int n = 10000) {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    const double x = from + (to - from) * i / n;
    m = std::min(m, C * g.value(x) + x * g.derivative(x));
  }
  return m;
}

}  // namespace

TEST(Potential, Examples) {
  EXPECT_NEAR(phi_potential(0.0, 1.0, 1.0, 0.0, 0.0, 32.0), 1.0, 1e-15);
  EXPECT_NEAR(phi_potential(0.0, 1.0, 0.0, 0.0, 1.0, 56.0), 1.0, 1e-15);
  const AdversaryState s = adversary_init(1.0, 1e-3, 1e6);
  EXPECT_NEAR(phi_potential(s), 3.52e-7, 1e-20);
  ASSERT_EQ(s.phi_history.size(), 1u);
}

TEST(Init, IntervalAndValues) {
  const AdversaryState s = adversary_init(1.0, 0.1, 100.0);
  EXPECT_DOUBLE_EQ(s.a, 0.5);
  EXPECT_DOUBLE_EQ(s.b, 1.0);
  EXPECT_DOUBLE_EQ(s.A, 0.1);
  EXPECT_DOUBLE_EQ(s.B, 0.0);
  EXPECT_DOUBLE_EQ(s.Bp, 0.2);
  EXPECT_THROW(adversary_init(0.0, 0.1, 1.0), std::invalid_argument);
  EXPECT_THROW(adversary_init(1.0, -1.0, 1.0), std::invalid_argument);
}

TEST(Answer, EndpointsAndHalves) {
  AdversaryState s = adversary_init(1.0, 0.01, 1e4);
  const Answer at_b = adversary_answer(s, 1.0);
  EXPECT_DOUBLE_EQ(at_b.g, s.B);
  EXPECT_DOUBLE_EQ(at_b.g_prime, s.Bp);

  AdversaryState t = adversary_init(1.0, 0.01, 1e4);
  const Answer mid = adversary_answer(t, 0.75);
  EXPECT_DOUBLE_EQ(mid.g, 0.01);
  EXPECT_DOUBLE_EQ(mid.g_prime, 0.0);
  EXPECT_DOUBLE_EQ(t.a, 0.75);
  EXPECT_DOUBLE_EQ(t.b, 1.0);
  EXPECT_TRUE(t.queries.back().live);

  const Answer left = adversary_answer(t, 0.1);
  EXPECT_DOUBLE_EQ(left.g, 0.01);
  EXPECT_FALSE(t.queries.back().live);
  EXPECT_DOUBLE_EQ(t.a, 0.75);
  EXPECT_THROW(adversary_answer(t, 1.5), std::invalid_argument);
}

TEST(Answer, RightHalfCommitsAndAnswersLaterQueriesConsistently) {
  AdversaryState s = adversary_init(2.0, 0.01, 1e5);
  const Answer r = adversary_answer(s, 0.9);
  EXPECT_DOUBLE_EQ(s.b, 0.9);
  ASSERT_EQ(s.committed.size(), 1u);
  EXPECT_DOUBLE_EQ(s.B, r.g);
  EXPECT_DOUBLE_EQ(s.Bp, r.g_prime);
  // A repeated query in the committed stretch returns the same answer.
  const Answer again = adversary_answer(s, 0.9);
  EXPECT_DOUBLE_EQ(again.g, r.g);
  EXPECT_DOUBLE_EQ(again.g_prime, r.g_prime);
}

TEST(Answer, RandomSequencesKeepPotentialGrowthBounded) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const double C = std::exp(std::log(0.1) + u(rng) * std::log(100.0));
    AdversaryState s = adversary_init(C, 1e-4, 1e7);
    const int N = 1 + trial % 8;
    for (int k = 0; k < N; ++k) {
      const double lam = u(rng) < 0.8 ? s.a + (s.b - s.a) * u(rng) : u(rng);
      adversary_answer(s, lam);
      const auto& h = s.phi_history;
      ASSERT_LE(h.back(), 5.0 * h[h.size() - 2] + 1e-12) << "trial " << trial << " k " << k;
    }
    EXPECT_LE(s.phi_history.back(), std::pow(5.0, N) * s.phi_history.front() * (1.0 + 1e-9));
    if (s.phi_history.back() <= 1.0) {
      const PiecewiseDerivative g1 =
          extend_to_unit(s, construct_g1(s.a, s.b, s.A, s.B, s.Bp, s.Lstar, s.C, s.eps));
      const PiecewiseDerivative g2 =
          extend_to_unit(s, construct_g2(s.a, s.b, s.A, s.B, s.Bp, s.Lstar, s.C, s.eps));
      const CounterexampleReport rep = verify_counterexample(s, g1, g2);
      ASSERT_TRUE(rep.pass) << "trial " << trial << ": " << rep.detail;
    }
  }
}

TEST(G1, FlatWhenNothingToDescend) {
  const PiecewiseDerivative g = construct_g1(0.5, 1.0, 0.05, 0.05, 0.0, 10.0, 1.0, 0.05);
  for (double x : {0.5, 0.6, 0.8, 1.0}) {
    EXPECT_NEAR(g.value(x), 0.05, 1e-15);
    EXPECT_NEAR(g.derivative(x), 0.0, 1e-15);
  }
}

TEST(G1, DipDepthAndIntegral) {
  const PiecewiseDerivative g = construct_g1(0.5, 1.0, 0.1, 0.0, 0.05, 10.0, 1.0, 0.05);
  EXPECT_NEAR(g.derivative(0.875), -0.825, 1e-14);
  EXPECT_NEAR(g.derivative(0.75), 0.0, 1e-15);
  EXPECT_NEAR(g.value(1.0) - g.value(0.5), -0.1, 1e-12);
  EXPECT_NEAR(g.derivative(1.0), 0.05, 1e-15);
  EXPECT_GE(grid_min_condition(g, 1.0, 0.5, 0.75), 0.05 * (1.0 - 1e-12));
}

TEST(G2, RejectsDegenerateSlopeData) {
  EXPECT_THROW(construct_g2(0.5, 1.0, 0.1, 0.0, 0.0, 10.0, 1.0, 0.05), PreconditionViolation);
}

TEST(G2, ShapeAtInit) {
  for (double C : {0.3, 1.0, 4.0}) {
    const double eps = 1e-3, L = 1e6;
    const AdversaryState s = adversary_init(C, eps, L);
    const PiecewiseDerivative g =
        construct_g2(s.a, s.b, s.A, s.B, s.Bp, s.Lstar, s.C, s.eps);
    const double mid = 0.5 * (s.a + s.b);
    EXPECT_NEAR(g.derivative(s.a), 0.0, 1e-15);
    EXPECT_NEAR(g.derivative(s.b), s.Bp, 1e-15);
    EXPECT_NEAR(g.derivative(mid), 5.0 / 3.0 * s.Bp, 1e-12 * s.Bp);
    EXPECT_NEAR(g.value(s.a), s.A, 1e-15);
    EXPECT_NEAR(g.value(s.b) - g.value(s.a), s.B - s.A, 1e-12);
    EXPECT_GE(grid_min_condition(g, C, mid, s.b), eps * (1.0 - 1e-12));
    EXPECT_LE(g.max_abs_slope(), L);
  }
}

TEST(PiecewiseDerivative, MinConditionMatchesDenseGrid) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> knots{0.1, 0.3, 0.3, 0.55, 0.9};
    std::vector<double> d;
    for (std::size_t i = 0; i < knots.size(); ++i) d.push_back(u(rng));
    const PiecewiseDerivative g(knots, d, u(rng));
    const double C = 0.1 + 3.0 * std::abs(u(rng));
    const double exact = g.min_condition(C, 0.2, 0.8);
    const double grid = grid_min_condition(g, C, 0.2, 0.8, 200000);
    ASSERT_LE(exact, grid + 1e-12);
    // g' jumps at the repeated knot; the grid reaches that limit within one step.
    ASSERT_GE(exact, grid - 1e-4);
  }
  const PiecewiseDerivative g({0.0, 1.0}, {1.0, 1.0}, 0.0);
  EXPECT_TRUE(std::isinf(g.min_condition(1.0, 2.0, 3.0)));
  EXPECT_THROW(PiecewiseDerivative({0.0, 1.0}, {1.0}, 0.0), std::invalid_argument);
  EXPECT_THROW(PiecewiseDerivative({1.0, 0.0}, {1.0, 1.0}, 0.0), std::invalid_argument);
}

TEST(Verify, FreshStatePasses) {
  const GameReport r = run_adversary_game(1.0, 1e-3, 1e6, QueryStrategy::Bisection, 0);
  EXPECT_TRUE(r.verdict.pass) << r.verdict.detail;
}

TEST(Verify, BisectionEightQueries) {
  const GameReport r = run_adversary_game(1.0, 1e-3, 1e6, QueryStrategy::Bisection, 8);
  EXPECT_NEAR(r.query_budget, std::log(1e6 / (88.0 * 1e-3 * 4.0)) / std::log(5.0), 1e-12);
  EXPECT_LT(r.N, r.query_budget);
  EXPECT_TRUE(r.phi_growth_ok);
  EXPECT_TRUE(r.constructed);
  EXPECT_TRUE(r.verdict.pass) << r.verdict.detail;
  EXPECT_EQ(r.state.queries.size(), 8u);
  EXPECT_GE(r.verdict.g1_left_min, 1e-3 * (1.0 - 1e-12));
  EXPECT_GE(r.verdict.g2_right_min, 1e-3 * (1.0 - 1e-12));
}

TEST(Verify, GridStrategy) {
  const GameReport r = run_adversary_game(1.0, 1e-3, 1e6, QueryStrategy::Grid, 6);
  EXPECT_TRUE(r.phi_growth_ok);
  EXPECT_TRUE(r.verdict.pass) << r.verdict.detail;
}

TEST(Verify, DetectsTampering) {
  const GameReport r = run_adversary_game(1.0, 1e-3, 1e6, QueryStrategy::Bisection, 4);
  ASSERT_TRUE(r.verdict.pass);

  std::vector<double> d = r.g1.derivs();
  const auto& k = r.g1.knots();
  // Steepen one positive-length piece past Lstar.
  for (std::size_t i = 0; i + 1 < k.size(); ++i) {
    if (k[i + 1] - k[i] > 1e-3) {
      d[i + 1] = d[i] + 1.01 * r.Lstar * (k[i + 1] - k[i]);
      break;
    }
  }
  const PiecewiseDerivative steep(k, d, r.g1.value_at_first());
  const CounterexampleReport a = verify_counterexample(r.state, steep, r.g2);
  EXPECT_FALSE(a.pass);

  const PiecewiseDerivative shifted(k, r.g1.derivs(), r.g1.value_at_first() + 1e-6);
  const CounterexampleReport b = verify_counterexample(r.state, shifted, r.g2);
  EXPECT_FALSE(b.pass);
  EXPECT_FALSE(b.interpolates);
}

TEST(Strategy, Names) {
  EXPECT_EQ(parse_strategy(to_string(QueryStrategy::Grid)), QueryStrategy::Grid);
  EXPECT_EQ(parse_strategy("bisection"), QueryStrategy::Bisection);
  EXPECT_THROW(parse_strategy("random"), std::invalid_argument);
}
