#include "starmd/objectives.hpp"

#include "starmd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace starmd {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_input(const Problem& problem, VectorRef x) {
  if (x.size() != problem.dim) {
    throw DimensionMismatch("problem " + problem.id + " expects dimension " +
                            std::to_string(problem.dim) + ", got " +
                            std::to_string(x.size()));
  }
  require_finite(x, "oracle query");
}

double checked_value(const Problem& problem, VectorRef x) {
  check_input(problem, x);
  const double v = problem.value(x);
  if (!std::isfinite(v)) {
    throw NonFiniteInput("objective " + problem.id + " returned a non-finite value");
  }
  return v;
}

Vector checked_gradient(const Problem& problem, VectorRef x) {
  check_input(problem, x);
  Vector g = problem.gradient(x);
  require_finite(g, "objective gradient");
  return g;
}

using Params = std::map<std::string, double>;

std::pair<std::string, Params> parse_id(const std::string& id) {
  const auto colon = id.find(':');
  std::pair<std::string, Params> out{id.substr(0, colon), {}};
  if (colon == std::string::npos) return out;
  std::stringstream rest(id.substr(colon + 1));
  std::string item;
  while (std::getline(rest, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::invalid_argument("malformed parameter '" + item + "' in " + id);
    }
    std::size_t used = 0;
    const std::string text = item.substr(eq + 1);
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != text.size() || text.empty()) {
      throw std::invalid_argument("parameter '" + item + "' in " + id +
                                  " is not a number");
    }
    out.second[item.substr(0, eq)] = v;
  }
  return out;
}

double take(Params& params, const std::string& key, double fallback) {
  const auto it = params.find(key);
  if (it == params.end()) return fallback;
  const double v = it->second;
  params.erase(it);
  return v;
}

void reject_leftovers(const Params& params, const std::string& id) {
  if (!params.empty()) {
    throw std::invalid_argument("unknown parameter '" + params.begin()->first +
                                "' in problem id " + id);
  }
}

// 1, cond^(-1/(d-1)), ..., 1/cond.
Vector geometric_weights(Index d, double cond) {
  Vector w(d);
  for (Index i = 0; i < d; ++i) {
    w[i] = d == 1 ? 1.0 : std::pow(cond, -static_cast<double>(i) / (d - 1));
  }
  return w;
}

Vector random_signs(Index dim, std::mt19937_64& rng) {
  std::bernoulli_distribution coin;
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v[i] = coin(rng) ? 1.0 : -1.0;
  return v;
}

double radial_h(double a, int k, double theta) {
  const double s = std::sin(k * theta);
  return 1.0 + a * s * s;
}

// Sup over the circle of the spectral norm of the polar-frame Hessian
// [[2h, h'], [h', 2h + h'']], which is constant along rays.
double radial_hessian_bound(double a, int k) {
  constexpr int kGrid = 200000;
  double best = 0.0;
  for (int i = 0; i < kGrid; ++i) {
    const double th = kTwoPi * i / kGrid;
    const double h = radial_h(a, k, th);
    const double h1 = a * k * std::sin(2.0 * k * th);
    const double h2 = 2.0 * a * k * k * std::cos(2.0 * k * th);
    const double p = 2.0 * h;
    const double r = 2.0 * h + h2;
    const double spec = std::abs(0.5 * (p + r)) +
                        std::hypot(0.5 * (p - r), h1);
    best = std::max(best, spec);
  }
  return best * (1.0 + 1e-6);
}

}  // namespace

double Oracle::value(VectorRef x) {
  ++counter_.value_calls;
  return checked_value(*problem_, x);
}

Vector Oracle::gradient(VectorRef x) {
  ++counter_.grad_calls;
  return checked_gradient(*problem_, x);
}

double Oracle::peek_value(VectorRef x) const {
  ++diagnostic_calls_;
  return checked_value(*problem_, x);
}

Vector Oracle::peek_gradient(VectorRef x) const {
  ++diagnostic_calls_;
  return checked_gradient(*problem_, x);
}

Problem make_norm_power_objective(const NormSpec& norm, double kappa, double L,
                                  VectorRef center, double cond) {
  if (!(kappa > 1.0 && kappa <= 2.0)) {
    throw std::invalid_argument("kappa must lie in (1, 2]");
  }
  if (!(L > 0.0) || !std::isfinite(L)) {
    throw std::invalid_argument("L must be positive and finite");
  }
  if (!(cond >= 1.0) || !std::isfinite(cond)) {
    throw std::invalid_argument("condition number must be >= 1");
  }
  const bool euclidean = norm.is_pnorm() && norm.as_pnorm().p == 2.0;
  const bool separable = norm.is_pnorm() && norm.as_pnorm().p == kappa;
  if (!euclidean && !separable) {
    throw std::invalid_argument(
        "norm-power objective needs the Euclidean norm or kappa = p, got " +
        norm.describe() + " with kappa " + std::to_string(kappa));
  }
  if (cond != 1.0 && !separable) {
    throw std::invalid_argument("weighted norm-power objective needs kappa = p");
  }
  if (!norm.accepts(center.size())) {
    throw DimensionMismatch("center does not fit " + norm.describe());
  }
  require_finite(center, "norm-power center");

  const Vector c = center;
  std::ostringstream id;
  id << "pnormpow:p=" << norm.as_pnorm().p << ",k=" << kappa << ",L=" << L;
  Problem problem{
      .id = id.str(),
      .norm = norm,
      .value = nullptr,
      .gradient = nullptr,
      .tau = 1.0,
      .L = L * std::exp2(2.0 - kappa),
      .kappa = kappa,
      .dim = c.size(),
      .minimizer = c,
      .f_star = 0.0,
  };
  if (cond == 1.0) {
    problem.value = [norm, kappa, L, c](VectorRef x) {
      return L / kappa * std::pow(starmd::norm(norm, x - c), kappa);
    };
    problem.gradient = [norm, kappa, L, c](VectorRef x) -> Vector {
      return L * grad_norm_power(norm, kappa, x - c);
    };
    return problem;
  }
  id << ",cond=" << cond;
  problem.id = id.str();
  const Vector w = geometric_weights(c.size(), cond);
  problem.value = [w, kappa, L, c](VectorRef x) {
    return L / kappa * (w.array() * (x - c).array().abs().pow(kappa)).sum();
  };
  problem.gradient = [w, kappa, L, c](VectorRef x) -> Vector {
    Vector g(x.size());
    for (Index i = 0; i < x.size(); ++i) {
      const double z = x[i] - c[i];
      g[i] = z == 0.0 ? 0.0 : L * w[i] * std::copysign(std::pow(std::abs(z), kappa - 1.0), z);
    }
    return g;
  };
  return problem;
}

Problem make_quadratic_objective(VectorRef center, double cond) {
  if (!(cond >= 1.0) || !std::isfinite(cond)) {
    throw std::invalid_argument("condition number must be >= 1");
  }
  require_finite(center, "quadratic center");
  const Index d = center.size();
  if (d < 1) throw DimensionMismatch("quadratic needs dimension >= 1");
  const Vector h = geometric_weights(d, cond);
  const Vector c = center;
  std::ostringstream id;
  id << "quad:cond=" << cond;
  return Problem{
      .id = id.str(),
      .norm = NormSpec::pnorm(2.0),
      .value = [h, c](VectorRef x) {
        return 0.5 * (h.array() * (x - c).array().square()).sum();
      },
      .gradient = [h, c](VectorRef x) -> Vector { return h.cwiseProduct(x - c); },
      .tau = 1.0,
      .L = 1.0,
      .kappa = 2.0,
      .dim = d,
      .minimizer = c,
      .f_star = 0.0,
  };
}

Problem make_radial_star_objective(double a, int k, std::uint64_t seed) {
  if (!(a >= 0.0 && a < 1.0)) throw std::invalid_argument("amplitude must lie in [0, 1)");
  if (k < 1) throw std::invalid_argument("frequency must be >= 1");

  std::ostringstream id;
  id << "radialstar:a=" << a << ",k=" << k;
  Problem problem{
      .id = id.str(),
      .norm = NormSpec::pnorm(2.0),
      .value = [a, k](VectorRef x) {
        const double r2 = x.squaredNorm();
        if (r2 == 0.0) return 0.0;
        return r2 * radial_h(a, k, std::atan2(x[1], x[0]));
      },
      .gradient = [a, k](VectorRef x) -> Vector {
        if (x.squaredNorm() == 0.0) return Vector::Zero(2);
        const double th = std::atan2(x[1], x[0]);
        const double h = radial_h(a, k, th);
        const double h1 = a * k * std::sin(2.0 * k * th);
        Vector g(2);
        g << 2.0 * h * x[0] - h1 * x[1], 2.0 * h * x[1] + h1 * x[0];
        return g;
      },
      .tau = 2.0,
      .L = radial_hessian_bound(a, k),
      .kappa = 2.0,
      .dim = 2,
      .minimizer = Vector::Zero(2),
      .f_star = 0.0,
  };

  constexpr std::uint64_t kSamples = 10000;
  const auto smooth = certify_weak_smoothness(problem, problem.L, 2.0, kSamples, seed);
  if (!smooth.pass) {
    throw CertificationFailure(problem.id + ": smoothness constant " +
                               std::to_string(problem.L) + " not certified");
  }
  for (double tau : {0.5, 1.0, 1.5, 2.0}) {
    if (certify_star_convexity(problem, tau, kSamples, 1.0, seed).pass) {
      problem.tau = tau;
      return problem;
    }
  }
  throw CertificationFailure(problem.id + ": no tau <= 2 certified");
}

CatalogEntry make_problem(const std::string& id, Index dim, std::uint64_t seed) {
  auto [name, params] = parse_id(id);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 rng(seq);
  if (name == "quad") {
    const double cond = take(params, "cond", 1e10);
    reject_leftovers(params, id);
    if (dim < 1) throw std::invalid_argument("quad needs dimension >= 1");
    return {make_quadratic_objective(random_signs(dim, rng), cond), Vector::Zero(dim)};
  }
  if (name == "pnormpow") {
    const double p = take(params, "p", 2.0);
    const double kappa = take(params, "k", 2.0);
    const double L = take(params, "L", 1.0);
    const double cond = take(params, "cond", 1.0);
    reject_leftovers(params, id);
    if (dim < 1) throw std::invalid_argument("pnormpow needs dimension >= 1");
    return {make_norm_power_objective(NormSpec::pnorm(p), kappa, L,
                                      random_signs(dim, rng), cond),
            Vector::Zero(dim)};
  }
  if (name == "radialstar") {
    const double a = take(params, "a", 0.5);
    const double k = take(params, "k", 3.0);
    reject_leftovers(params, id);
    if (dim != 2) throw DimensionMismatch("radialstar is planar (dimension 2)");
    if (k != std::floor(k)) throw std::invalid_argument("radialstar frequency must be an integer");
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    const double th = angle(rng);
    Vector start(2);
    start << std::cos(th), std::sin(th);
    return {make_radial_star_objective(a, static_cast<int>(k), seed), start};
  }
  throw std::invalid_argument("unknown problem id '" + id + "'");
}

CertificationReport certify_star_convexity(const Problem& problem, double tau,
                                           std::uint64_t samples, double radius,
                                           std::uint64_t seed) {
  if (!problem.minimizer) {
    throw std::invalid_argument("star-convexity check needs a known minimizer");
  }
  const Vector& xs = *problem.minimizer;
  const double fs = problem.f_star ? *problem.f_star : problem.value(xs);
  std::mt19937_64 rng(seed);
  CertificationReport report{true, -std::numeric_limits<double>::infinity(), samples, seed};
  for (std::uint64_t i = 0; i < samples; ++i) {
    const Vector x = sample_ball(rng, xs, radius);
    const double f = checked_value(problem, x);
    const double violation = f - fs - tau * checked_gradient(problem, x).dot(x - xs);
    report.worst = std::max(report.worst, violation);
    if (violation > 1e-9 * (1.0 + std::abs(f))) report.pass = false;
  }
  return report;
}

CertificationReport certify_weak_smoothness(const Problem& problem, double L,
                                            double kappa, std::uint64_t samples,
                                            std::uint64_t seed, double radius) {
  const Vector center =
      problem.minimizer ? *problem.minimizer : Vector::Zero(problem.dim);
  std::mt19937_64 rng(seed);
  CertificationReport report{true, 0.0, samples, seed};
  for (std::uint64_t i = 0; i < samples; ++i) {
    const Vector x = sample_ball(rng, center, radius);
    const Vector y = sample_ball(rng, center, radius);
    const double dist = norm(problem.norm, x - y);
    if (dist == 0.0) continue;
    const double breg = checked_value(problem, x) - checked_value(problem, y) -
                        checked_gradient(problem, y).dot(x - y);
    report.worst = std::max(report.worst, std::abs(breg) * kappa / std::pow(dist, kappa));
  }
  report.pass = report.worst <= L * (1.0 + 1e-9);
  return report;
}

}  // namespace starmd
