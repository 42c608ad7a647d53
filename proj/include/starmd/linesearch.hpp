#pragma once

#include "starmd/objectives.hpp"

#include <optional>

namespace starmd {

struct SearchResult {
  double lambda = 1.0;
  Vector x_md;
  /// Gradient at x_md when the search already paid for it (every exit but
  /// lambda = 0).
  std::optional<Vector> grad_md;
  int probes = 0;
  /// lambda g'(lambda) + C g(lambda) at the returned lambda.
  double satisfied_value = 0.0;
};

/// ceil(log2(1/delta)) + 2 with delta = min{1/C, (kappa eps / (4 L dist^kappa))^(1/kappa)}
/// clamped to at most 1. Terms whose denominator vanishes are dropped.
int probe_bound(double C, double L, double kappa, double dist, double eps);

/// Generalized bisection for lambda in [0,1] with
/// lambda g'(lambda) + C g(lambda) <= eps, where
/// g(lambda) = F(lambda x_ag + (1 - lambda) x_t) - F(x_ag).
/// Exits early with lambda = 1 if g'(1) <= eps and with lambda = 0 if
/// C g(0) <= eps. A probe is one evaluation point; loop probes cost one value
/// and one gradient call. Throws BudgetExceeded after `max_probes`.
SearchResult binary_search(Oracle& oracle, VectorRef x_t, VectorRef x_ag,
                           double C, double eps, int max_probes);

}  // namespace starmd
