#pragma once

#include "starmd/geometry.hpp"

namespace starmd {

/// A norm together with its distance-generating function psi = |x|^q / q and
/// the modulus mu for which D_psi(x, y) >= (mu / q) |x - y|^q.
class Geometry {
 public:
  /// p in (1,2]: q = 2, mu = p - 1. p > 2: q = p, mu = 2^(-p(p-2)/(p-1)).
  /// Composites use q = 2 and need q = 2 in every block; mu is the smaller
  /// block modulus.
  explicit Geometry(NormSpec norm);

  const NormSpec& norm() const { return norm_; }
  double q() const { return q_; }
  double mu() const { return mu_; }

  double psi(VectorRef x) const;
  Vector grad_psi(VectorRef x) const;
  Vector grad_psi_inverse(VectorRef z) const;

  /// psi(x) - psi(y) - <grad psi(y), x - y>.
  double bregman(VectorRef x, VectorRef y) const;

 private:
  NormSpec norm_;
  double q_;
  double mu_;
};

Geometry make_geometry(const NormSpec& norm);

/// Solves argmin_x eta <grad, x> + D_psi(x, x_t).
Vector mirror_step(const Geometry& geom, VectorRef x_t, VectorRef grad,
                   double eta);

/// Solves argmin_x alpha <grad, x> + (mu / q) |x - x_md|^q.
Vector prox_step(const Geometry& geom, VectorRef x_md, VectorRef grad,
                 double alpha);

}  // namespace starmd
