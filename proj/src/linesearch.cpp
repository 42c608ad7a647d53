#include "starmd/linesearch.hpp"

#include "starmd/errors.hpp"

#include <cassert>
#include <cmath>
#include <limits>

namespace starmd {

int probe_bound(double C, double L, double kappa, double dist, double eps) {
  if (!(L > 0.0) || !(kappa > 0.0) || !(dist >= 0.0) || !(eps >= 0.0) ||
      std::isnan(C)) {
    throw std::invalid_argument("probe_bound needs L, kappa > 0 and dist, eps >= 0");
  }
  double delta = 1.0;
  if (C > 0.0) delta = std::min(delta, 1.0 / C);
  if (dist > 0.0) {
    delta = std::min(delta, std::pow(kappa * eps / (4.0 * L * std::pow(dist, kappa)),
                                     1.0 / kappa));
  }
  if (!(delta > 0.0)) {
    throw std::invalid_argument("probe_bound is unbounded for eps = 0");
  }
  return static_cast<int>(std::ceil(std::log2(1.0 / delta))) + 2;
}

SearchResult binary_search(Oracle& oracle, VectorRef x_t, VectorRef x_ag,
                           double C, double eps, int max_probes) {
  if (!(C >= 0.0) || !std::isfinite(C) || !(eps >= 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("binary search needs finite C, eps >= 0");
  }
  if (max_probes < 2) throw std::invalid_argument("max_probes must be >= 2");
  if (x_t.size() != x_ag.size()) {
    throw DimensionMismatch("search endpoints differ in dimension");
  }

  const Vector dir = x_ag - x_t;
  SearchResult out;

  Vector grad_ag = oracle.gradient(x_ag);
  out.probes = 1;
  const double d1 = grad_ag.dot(dir);
  if (d1 <= eps) {
    out.lambda = 1.0;
    out.x_md = x_ag;
    out.grad_md = std::move(grad_ag);
    out.satisfied_value = d1;
    return out;
  }

  const double f_ag = oracle.value(x_ag);
  const double g0 = oracle.value(x_t) - f_ag;
  out.probes = 2;
  if (C * g0 <= eps) {
    out.lambda = 0.0;
    out.x_md = x_t;
    out.satisfied_value = C * g0;
    return out;
  }

  double a = 0.0;
  double b = 1.0;
  [[maybe_unused]] double ga = g0;
  [[maybe_unused]] double gb = 0.0;
  [[maybe_unused]] double db = d1;
  while (true) {
    assert(ga > 0.0 && db > 0.0 && gb <= 0.0);
    if (out.probes >= max_probes) {
      throw BudgetExceeded("binary search exhausted " + std::to_string(max_probes) +
                           " probes on [" + std::to_string(a) + ", " +
                           std::to_string(b) + "]; declared smoothness is too small");
    }
    const double lam = 0.5 * (a + b);
    Vector x = lam * x_ag + (1.0 - lam) * x_t;
    const double g = oracle.value(x) - f_ag;
    Vector grad = oracle.gradient(x);
    const double d = grad.dot(dir);
    ++out.probes;
    const double cond = lam * d + C * g;
    if (cond <= eps) {
      out.lambda = lam;
      out.x_md = std::move(x);
      out.grad_md = std::move(grad);
      out.satisfied_value = cond;
      return out;
    }
    if (g > 0.0) {
      a = lam;
      ga = g;
    } else {
      b = lam;
      gb = g;
      db = d;
    }
  }
}

}  // namespace starmd
