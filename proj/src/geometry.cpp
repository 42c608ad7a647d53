#include "starmd/geometry.hpp"

#include "starmd/errors.hpp"

#include <cmath>
#include <sstream>

namespace starmd {

namespace {

void check_dim(const NormSpec& spec, Index dim) {
  if (!spec.accepts(dim)) {
    std::ostringstream msg;
    msg << "vector of dimension " << dim << " does not fit norm "
        << spec.describe();
    throw DimensionMismatch(msg.str());
  }
}

// Scaled by the largest coordinate so that |x_i|^p neither overflows nor
// underflows for large p.
double pnorm_value(VectorRef x, double p) {
  const double m = x.cwiseAbs().maxCoeff();
  if (m == 0.0) return 0.0;
  if (p == 2.0) return m * (x / m).norm();
  double sum = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    sum += std::pow(std::abs(x[i]) / m, p);
  }
  return m * std::pow(sum, 1.0 / p);
}

// Gradient of |x|_p^s / s in ratio form: |x|^(s-1) sign(x_i) (|x_i|/|x|)^(p-1).
Vector pnorm_grad_power(VectorRef x, double p, double s) {
  const double n = pnorm_value(x, p);
  if (n == 0.0) return Vector::Zero(x.size());
  if (p == 2.0) return std::pow(n, s - 2.0) * x;
  const double coef = std::pow(n, s - 1.0);
  Vector out(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) {
      out[i] = 0.0;
    } else {
      out[i] = coef * std::copysign(std::pow(std::abs(xi) / n, p - 1.0), xi);
    }
  }
  return out;
}

// Gradient of |z|_*^2 / 2, i.e. the inverse of grad_norm_power(spec, 2, .).
Vector dual_half_square_grad(const NormSpec& spec, VectorRef z) {
  if (spec.is_pnorm()) {
    return pnorm_grad_power(z, conjugate_exponent(spec.as_pnorm().p), 2.0);
  }
  const auto& c = spec.as_composite();
  const Index tail = z.size() - c.split;
  Vector out(z.size());
  out.head(c.split) = dual_half_square_grad(*c.left, z.head(c.split)) / c.lambda;
  out.tail(tail) = dual_half_square_grad(*c.right, z.tail(tail)) / (1.0 - c.lambda);
  return out;
}

double norm_unchecked(const NormSpec& spec, VectorRef x) {
  if (spec.is_pnorm()) return pnorm_value(x, spec.as_pnorm().p);
  const auto& c = spec.as_composite();
  const double a = norm_unchecked(*c.left, x.head(c.split));
  const double b = norm_unchecked(*c.right, x.tail(x.size() - c.split));
  return std::sqrt(c.lambda * a * a + (1.0 - c.lambda) * b * b);
}

double dual_norm_unchecked(const NormSpec& spec, VectorRef z) {
  if (spec.is_pnorm()) {
    return pnorm_value(z, conjugate_exponent(spec.as_pnorm().p));
  }
  const auto& c = spec.as_composite();
  const double a = dual_norm_unchecked(*c.left, z.head(c.split));
  const double b = dual_norm_unchecked(*c.right, z.tail(z.size() - c.split));
  return std::sqrt(a * a / c.lambda + b * b / (1.0 - c.lambda));
}

Vector grad_norm_power_unchecked(const NormSpec& spec, double s, VectorRef x) {
  if (spec.is_pnorm()) return pnorm_grad_power(x, spec.as_pnorm().p, s);
  const auto& c = spec.as_composite();
  const double n = norm_unchecked(spec, x);
  if (n == 0.0) return Vector::Zero(x.size());
  const Index tail = x.size() - c.split;
  Vector out(x.size());
  out.head(c.split) = c.lambda * grad_norm_power_unchecked(*c.left, 2.0, x.head(c.split));
  out.tail(tail) =
      (1.0 - c.lambda) * grad_norm_power_unchecked(*c.right, 2.0, x.tail(tail));
  if (s != 2.0) out *= std::pow(n, s - 2.0);
  return out;
}

}  // namespace

NormSpec NormSpec::pnorm(double p, double p_max) {
  if (!std::isfinite(p) || p <= 1.0) {
    throw std::invalid_argument("p-norm requires finite p > 1, got " +
                                std::to_string(p));
  }
  if (p > p_max) {
    throw std::invalid_argument("p = " + std::to_string(p) +
                                " exceeds p_max = " + std::to_string(p_max));
  }
  return NormSpec(PNorm{p});
}

NormSpec NormSpec::composite(NormSpec left, NormSpec right, double lambda,
                             Index split) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw std::invalid_argument("composite weight must lie in (0,1)");
  }
  if (split < 1 || !left.accepts(split)) {
    throw std::invalid_argument("composite split " + std::to_string(split) +
                                " does not fit the left block");
  }
  return NormSpec(CompositeNorm{std::make_shared<const NormSpec>(std::move(left)),
                                std::make_shared<const NormSpec>(std::move(right)),
                                lambda, split});
}

const PNorm& NormSpec::as_pnorm() const { return std::get<PNorm>(kind_); }

const CompositeNorm& NormSpec::as_composite() const {
  return std::get<CompositeNorm>(kind_);
}

bool NormSpec::accepts(Index dim) const {
  if (is_pnorm()) return dim >= 1;
  const auto& c = as_composite();
  return dim > c.split && c.left->accepts(c.split) &&
         c.right->accepts(dim - c.split);
}

Index NormSpec::min_dim() const {
  if (is_pnorm()) return 1;
  const auto& c = as_composite();
  return c.split + c.right->min_dim();
}

std::string NormSpec::describe() const {
  std::ostringstream out;
  if (is_pnorm()) {
    out << "l" << as_pnorm().p;
  } else {
    const auto& c = as_composite();
    out << "(" << c.left->describe() << " o " << c.right->describe()
        << ", lambda=" << c.lambda << ", split=" << c.split << ")";
  }
  return out.str();
}

void require_finite(VectorRef x, const char* what) {
  if (!x.allFinite()) {
    throw NonFiniteInput(std::string(what) + " has non-finite coordinates");
  }
}

double norm(const NormSpec& spec, VectorRef x) {
  check_dim(spec, x.size());
  require_finite(x, "norm argument");
  return norm_unchecked(spec, x);
}

double dual_norm(const NormSpec& spec, VectorRef z) {
  check_dim(spec, z.size());
  require_finite(z, "dual norm argument");
  return dual_norm_unchecked(spec, z);
}

Vector grad_norm_power(const NormSpec& spec, double s, VectorRef x) {
  if (!(s >= 1.0)) throw std::invalid_argument("norm power must be >= 1");
  check_dim(spec, x.size());
  require_finite(x, "grad_norm_power argument");
  return grad_norm_power_unchecked(spec, s, x);
}

Vector inverse_grad_norm_power(const NormSpec& spec, double s, VectorRef z,
                               double rel_tol) {
  if (!(s > 1.0)) throw std::invalid_argument("inverse needs norm power > 1");
  check_dim(spec, z.size());
  require_finite(z, "inverse_grad_norm_power argument");

  const double zn = dual_norm_unchecked(spec, z);
  if (zn == 0.0) return Vector::Zero(z.size());
  Vector u = dual_half_square_grad(spec, z);
  const double s_conj = conjugate_exponent(s);
  if (s_conj != 2.0) u *= std::pow(zn, s_conj - 2.0);
  if (!u.allFinite()) {
    throw RoundTripFailure("inverse mirror map overflowed for " + spec.describe());
  }

  const Vector back = grad_norm_power_unchecked(spec, s, u);
  const double residual = dual_norm_unchecked(spec, back - z);
  if (!(residual <= rel_tol * zn)) {
    std::ostringstream msg;
    msg << "inverse of grad |.|^" << s << "/" << s << " under "
        << spec.describe() << " has relative residual " << residual / zn;
    throw RoundTripFailure(msg.str());
  }
  return u;
}

}  // namespace starmd
