#pragma once

#include "starmd/geometry.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace starmd {

/// Objective with declared constants: tau-star-convex around `minimizer` and
/// (L, kappa)-weakly smooth with respect to `norm`.
struct Problem {
  std::string id;
  NormSpec norm;
  std::function<double(VectorRef)> value;
  std::function<Vector(VectorRef)> gradient;
  double tau = 1.0;
  double L = 1.0;
  double kappa = 2.0;
  Index dim = 0;
  std::optional<Vector> minimizer;
  std::optional<double> f_star;
};

struct OracleCounter {
  std::uint64_t value_calls = 0;
  std::uint64_t grad_calls = 0;

  std::uint64_t total() const { return value_calls + grad_calls; }
};

/// Counting front end to a Problem. Every value() and gradient() call bumps
/// the counter by one; the peek_* variants are for diagnostics and are
/// tallied separately.
class Oracle {
 public:
  explicit Oracle(const Problem& problem) : problem_(&problem) {}

  double value(VectorRef x);
  Vector gradient(VectorRef x);

  double peek_value(VectorRef x) const;
  Vector peek_gradient(VectorRef x) const;

  const Problem& problem() const { return *problem_; }
  const OracleCounter& counter() const { return counter_; }
  std::uint64_t diagnostic_calls() const { return diagnostic_calls_; }

 private:
  const Problem* problem_;
  OracleCounter counter_;
  mutable std::uint64_t diagnostic_calls_ = 0;
};

/// F(x) = (L / kappa) |x - center|^kappa. Declared smoothness is
/// L * 2^(2 - kappa); accepted for the Euclidean norm with any kappa in (1,2]
/// and for p-norms with kappa = p. With cond > 1 (kappa = p only) coordinate
/// i is weighted by cond^(-i/(d-1)), giving (L / kappa) sum_i w_i |x_i - c_i|^kappa.
Problem make_norm_power_objective(const NormSpec& norm, double kappa, double L,
                                  VectorRef center, double cond = 1.0);

/// F(x) = 1/2 sum_i h_i (x_i - c_i)^2 with h_i spaced geometrically from 1
/// down to 1/cond.
Problem make_quadratic_objective(VectorRef center, double cond);

/// Planar F(x) = |x|^2 (1 + a sin^2(k theta)). tau is the smallest value in
/// {0.5, 1, 1.5, 2} that passes certify_star_convexity; L is the largest
/// Hessian spectral norm over the circle. Throws CertificationFailure when
/// neither certifier accepts.
Problem make_radial_star_objective(double a, int k, std::uint64_t seed = 7);

struct CatalogEntry {
  Problem problem;
  Vector start;
};

/// Ids: "quad[:cond=..]" (default cond 1e10), "pnormpow:p=..,k=..[,L=..,cond=..]",
/// "radialstar:a=..,k=..". quad and pnormpow start at 0 with a center of
/// random signs; the radial start is a random point on the unit circle.
CatalogEntry make_problem(const std::string& id, Index dim, std::uint64_t seed);

struct CertificationReport {
  bool pass = false;
  double worst = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

/// Worst F(x) - F* - tau <grad F(x), x - x*> over points drawn uniformly
/// from the Euclidean ball of `radius` around the minimizer. Passes iff every
/// sample stays below 1e-9 (1 + |F(x)|).
CertificationReport certify_star_convexity(const Problem& problem, double tau,
                                           std::uint64_t samples, double radius,
                                           std::uint64_t seed);

/// Worst |D_F(x, y)| kappa / |x - y|^kappa over pairs drawn from the ball of
/// `radius` around the minimizer (or the origin). Passes iff <= L (1 + 1e-9).
CertificationReport certify_weak_smoothness(const Problem& problem, double L,
                                            double kappa, std::uint64_t samples,
                                            std::uint64_t seed,
                                            double radius = 1.0);

/// Uniform draw from the Euclidean ball of `radius` around `center`.
template <class Rng>
Vector sample_ball(Rng& rng, VectorRef center, double radius);

}  // namespace starmd

#include "starmd/detail/sampling.hpp"
