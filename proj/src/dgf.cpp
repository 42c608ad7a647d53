#include "starmd/dgf.hpp"

#include "starmd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace starmd {

namespace {

struct Modulus {
  double q;
  double mu;
};

Modulus modulus_of(const NormSpec& spec) {
  if (spec.is_pnorm()) {
    const double p = spec.as_pnorm().p;
    if (p <= 2.0) return {2.0, p - 1.0};
    return {p, std::exp2(-p * (p - 2.0) / (p - 1.0))};
  }
  const auto& c = spec.as_composite();
  const Modulus l = modulus_of(*c.left);
  const Modulus r = modulus_of(*c.right);
  if (l.q != 2.0 || r.q != 2.0) {
    throw std::invalid_argument(
        "composite geometry needs q = 2 in every block (p <= 2), got " +
        spec.describe());
  }
  return {2.0, std::min(l.mu, r.mu)};
}

void check_same_dim(VectorRef x, VectorRef y) {
  if (x.size() != y.size()) {
    throw DimensionMismatch("vectors of dimension " + std::to_string(x.size()) +
                            " and " + std::to_string(y.size()));
  }
}

}  // namespace

Geometry::Geometry(NormSpec norm) : norm_(std::move(norm)) {
  const Modulus m = modulus_of(norm_);
  q_ = m.q;
  mu_ = m.mu;
}

double Geometry::psi(VectorRef x) const {
  return std::pow(starmd::norm(norm_, x), q_) / q_;
}

Vector Geometry::grad_psi(VectorRef x) const {
  return grad_norm_power(norm_, q_, x);
}

Vector Geometry::grad_psi_inverse(VectorRef z) const {
  return inverse_grad_norm_power(norm_, q_, z);
}

double Geometry::bregman(VectorRef x, VectorRef y) const {
  check_same_dim(x, y);
  return psi(x) - psi(y) - grad_psi(y).dot(x - y);
}

Geometry make_geometry(const NormSpec& norm) { return Geometry(norm); }

Vector mirror_step(const Geometry& geom, VectorRef x_t, VectorRef grad,
                   double eta) {
  check_same_dim(x_t, grad);
  require_finite(grad, "mirror step gradient");
  if (eta == 0.0) return x_t;
  return geom.grad_psi_inverse(geom.grad_psi(x_t) - eta * grad);
}

Vector prox_step(const Geometry& geom, VectorRef x_md, VectorRef grad,
                 double alpha) {
  check_same_dim(x_md, grad);
  require_finite(grad, "prox step gradient");
  const Vector target = (-alpha / geom.mu()) * grad;
  return x_md + inverse_grad_norm_power(geom.norm(), geom.q(), target);
}

}  // namespace starmd
