#include "starmd/dgf.hpp"
#include "starmd/errors.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace starmd;
using starmd::testing::gaussian;
using starmd::testing::uniform;

namespace {

NormSpec example2() {
  return NormSpec::composite(NormSpec::pnorm(2.0), NormSpec::pnorm(1.5), 0.5, 3);
}

std::vector<Geometry> geometries() {
  return {Geometry(NormSpec::pnorm(1.5)), Geometry(NormSpec::pnorm(2.0)),
          Geometry(NormSpec::pnorm(3.0)), Geometry(NormSpec::pnorm(7.0)),
          Geometry(example2())};
}

}  // namespace

TEST(MakeGeometry, Moduli) {
  const Geometry a = make_geometry(NormSpec::pnorm(1.5));
  EXPECT_EQ(a.q(), 2.0);
  EXPECT_DOUBLE_EQ(a.mu(), 0.5);
  const Geometry b = make_geometry(NormSpec::pnorm(3.0));
  EXPECT_EQ(b.q(), 3.0);
  EXPECT_DOUBLE_EQ(b.mu(), std::pow(2.0, -1.5));
  const Geometry c = make_geometry(NormSpec::pnorm(2.0));
  EXPECT_EQ(c.q(), 2.0);
  EXPECT_EQ(c.mu(), 1.0);
}

TEST(MakeGeometry, CompositeTakesWeakerModulus) {
  const Geometry g(example2());
  EXPECT_EQ(g.q(), 2.0);
  EXPECT_DOUBLE_EQ(g.mu(), 0.5);
  const Geometry h(NormSpec::composite(NormSpec::pnorm(1.2), NormSpec::pnorm(1.8), 0.9, 2));
  EXPECT_DOUBLE_EQ(h.mu(), 0.2);
}

TEST(MakeGeometry, RejectsMixedOrderComposite) {
  EXPECT_THROW(Geometry(NormSpec::composite(NormSpec::pnorm(3.0), NormSpec::pnorm(1.5), 0.5, 2)),
               std::invalid_argument);
}

TEST(Bregman, EuclideanIsHalfSquaredDistance) {
  const Geometry g(NormSpec::pnorm(2.0));
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const Vector x = gaussian(rng, 5), y = gaussian(rng, 5);
    ASSERT_NEAR(g.bregman(x, y), 0.5 * (x - y).squaredNorm(), 1e-12);
  }
}

TEST(Bregman, IdentityIsZero) {
  const Geometry g(NormSpec::pnorm(1.5));
  Vector x(2);
  x << 7, -3;
  EXPECT_NEAR(g.bregman(x, x), 0.0, 1e-12);
}

TEST(Bregman, Example2StrongConvexity) {
  const Geometry g(example2());
  std::mt19937_64 rng(2);
  for (int i = 0; i < 10000; ++i) {
    const Vector x = gaussian(rng, 7), y = gaussian(rng, 7);
    const double d = norm(g.norm(), x - y);
    ASSERT_GE(g.bregman(x, y), d * d / 4.0 - 1e-12);
  }
}

TEST(Bregman, DimensionMismatch) {
  const Geometry g(NormSpec::pnorm(2.0));
  EXPECT_THROW(g.bregman(Vector::Zero(2), Vector::Zero(3)), DimensionMismatch);
}

TEST(Bregman, UniformConvexity) {
  std::mt19937_64 rng(3);
  for (const Geometry& g : geometries()) {
    for (int i = 0; i < 10000; ++i) {
      const Vector x = gaussian(rng, 7), y = gaussian(rng, 7);
      const double d = norm(g.norm(), x - y);
      ASSERT_GE(g.bregman(x, y), g.mu() / g.q() * std::pow(d, g.q()) - 1e-12)
          << g.norm().describe();
    }
  }
}

TEST(Bregman, BoundedByTwiceLargerRadius) {
  std::mt19937_64 rng(4);
  for (const Geometry& g : geometries()) {
    if (!g.norm().is_pnorm()) continue;
    for (int i = 0; i < 10000; ++i) {
      const Vector x = gaussian(rng, 6), y = gaussian(rng, 6);
      const double m = std::max(std::pow(norm(g.norm(), x), g.q()), std::pow(norm(g.norm(), y), g.q()));
      ASSERT_LE(g.bregman(x, y), 2.0 * m + 1e-12);
    }
  }
}

TEST(Bregman, ThreePointsIdentity) {
  std::mt19937_64 rng(5);
  for (const Geometry& g : geometries()) {
    for (int i = 0; i < 2000; ++i) {
      const Vector u = gaussian(rng, 7), us = gaussian(rng, 7), y = gaussian(rng, 7);
      const double lhs = (g.grad_psi(us) - g.grad_psi(y)).dot(u - us);
      const double rhs = g.bregman(u, y) - g.bregman(u, us) - g.bregman(us, y);
      ASSERT_NEAR(lhs, rhs, 1e-10) << g.norm().describe();
    }
  }
}

TEST(GradPsi, EuclideanIdentity) {
  const Geometry g(NormSpec::pnorm(2.0));
  std::mt19937_64 rng(6);
  const Vector x = gaussian(rng, 4);
  EXPECT_TRUE(g.grad_psi(x).isApprox(x, 1e-15));
  EXPECT_TRUE(g.grad_psi_inverse(x).isApprox(x, 1e-15));
}

TEST(GradPsi, RoundTrip) {
  std::mt19937_64 rng(7);
  for (const Geometry& g : geometries()) {
    for (int i = 0; i < 200; ++i) {
      const Vector z = gaussian(rng, 7);
      const Vector x = g.grad_psi_inverse(z);
      ASSERT_LE(dual_norm(g.norm(), g.grad_psi(x) - z), 1e-8 * dual_norm(g.norm(), z));
    }
  }
}

TEST(GradPsi, CompositeIsBlockwise) {
  const NormSpec n = example2();
  const Geometry g(n);
  const auto& c = n.as_composite();
  std::mt19937_64 rng(8);
  Vector x = gaussian(rng, 7);
  x.head(3) *= 0.0;
  x.tail(4) = gaussian(rng, 4);
  // Only the right block is active, so the gradient is (1 - lambda) times its own phi.
  const Vector g_full = g.grad_psi(x);
  const Vector g_right = grad_norm_power(*c.right, 2.0, x.tail(4));
  EXPECT_TRUE(g_full.head(3).isZero(0.0));
  EXPECT_TRUE(g_full.tail(4).isApprox((1.0 - c.lambda) * g_right, 1e-13));
}

TEST(MirrorStep, EuclideanIsGradientStep) {
  const Geometry g(NormSpec::pnorm(2.0));
  std::mt19937_64 rng(9);
  const Vector x = gaussian(rng, 5), d = gaussian(rng, 5);
  EXPECT_TRUE(mirror_step(g, x, d, 0.3).isApprox(x - 0.3 * d, 1e-14));
  EXPECT_EQ(mirror_step(g, x, d, 0.0), x);
}

TEST(MirrorStep, LocalMinimality) {
  const Geometry g(NormSpec::pnorm(1.5));
  std::mt19937_64 rng(10);
  for (int k = 0; k < 5; ++k) {
    const Vector x = gaussian(rng, 6), d = gaussian(rng, 6);
    const double eta = uniform(rng, 0.1, 1.0);
    auto obj = [&](VectorRef y) { return eta * d.dot(y) + g.bregman(y, x); };
    const Vector best = mirror_step(g, x, d, eta);
    const double f0 = obj(best);
    for (int i = 0; i < 1000; ++i) {
      const Vector y = best + gaussian(rng, 6, std::pow(10.0, uniform(rng, -4, 0)));
      ASSERT_GE(obj(y), f0 - 1e-12);
    }
  }
}

TEST(ProxStep, EuclideanAndZeroGradient) {
  const Geometry g(NormSpec::pnorm(2.0));
  std::mt19937_64 rng(11);
  const Vector x = gaussian(rng, 5), d = gaussian(rng, 5);
  EXPECT_TRUE(prox_step(g, x, d, 0.4).isApprox(x - 0.4 * d, 1e-14));
  const Geometry h(NormSpec::pnorm(1.5));
  EXPECT_EQ(prox_step(h, x, Vector::Zero(5), 0.4), x);
  EXPECT_TRUE(prox_step(h, x, d, 0.4).isApprox(x + inverse_grad_norm_power(h.norm(), 2.0, -0.8 * d), 1e-14));
}

TEST(ProxStep, Stationarity) {
  std::mt19937_64 rng(12);
  for (const Geometry& g : geometries()) {
    for (int i = 0; i < 100; ++i) {
      const Vector x = gaussian(rng, 7), d = gaussian(rng, 7);
      const double alpha = uniform(rng, 0.01, 2.0);
      const Vector u = prox_step(g, x, d, alpha) - x;
      const Vector res = alpha * d + g.mu() * grad_norm_power(g.norm(), g.q(), u);
      ASSERT_LE(dual_norm(g.norm(), res), 1e-8 * alpha * dual_norm(g.norm(), d));
    }
  }
}

TEST(Steps, RejectBadInputs) {
  const Geometry g(NormSpec::pnorm(2.0));
  EXPECT_THROW(mirror_step(g, Vector::Zero(2), Vector::Zero(3), 1.0), DimensionMismatch);
  Vector bad = Vector::Zero(2);
  bad[0] = std::nan("");
  EXPECT_THROW(prox_step(g, Vector::Zero(2), bad, 1.0), NonFiniteInput);
}
