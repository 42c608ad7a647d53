#pragma once

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <variant>

namespace starmd {

using Vector = Eigen::VectorXd;
using VectorRef = Eigen::Ref<const Eigen::VectorXd>;
using Index = Eigen::Index;

inline constexpr double kDefaultPMax = 64.0;

class NormSpec;

struct PNorm {
  double p;
};

/// sqrt(lambda * |x_head|_left^2 + (1 - lambda) * |x_tail|_right^2), where
/// x_head holds the first `split` coordinates.
struct CompositeNorm {
  std::shared_ptr<const NormSpec> left;
  std::shared_ptr<const NormSpec> right;
  double lambda;
  Index split;
};

/// A norm on R^d: either an l_p norm with 1 < p <= p_max, or a weighted
/// two-block composite of norms (which may itself nest further composites).
/// Immutable after construction.
class NormSpec {
 public:
  static NormSpec pnorm(double p, double p_max = kDefaultPMax);
  static NormSpec composite(NormSpec left, NormSpec right, double lambda,
                            Index split);

  bool is_pnorm() const { return std::holds_alternative<PNorm>(kind_); }
  bool is_composite() const { return !is_pnorm(); }
  const PNorm& as_pnorm() const;
  const CompositeNorm& as_composite() const;

  /// Whether vectors of length `dim` are valid inputs.
  bool accepts(Index dim) const;
  /// Smallest dimension accepted.
  Index min_dim() const;

  std::string describe() const;

 private:
  explicit NormSpec(std::variant<PNorm, CompositeNorm> kind)
      : kind_(std::move(kind)) {}

  std::variant<PNorm, CompositeNorm> kind_;
};

/// Conjugate exponent: 1/p + 1/p* = 1.
inline double conjugate_exponent(double p) { return p / (p - 1.0); }

double norm(const NormSpec& spec, VectorRef x);
double dual_norm(const NormSpec& spec, VectorRef z);

/// Gradient of |x|^s / s. Returns 0 at x = 0 and uses |t|^(p-2) t := 0 at
/// t = 0 on coordinate axes.
Vector grad_norm_power(const NormSpec& spec, double s, VectorRef x);

/// Solves grad_norm_power(spec, s, u) = z for u via the gradient of the
/// conjugate |z|_*^(s*) / s*. Throws RoundTripFailure if the forward map
/// does not reproduce z to `rel_tol` in the dual norm.
Vector inverse_grad_norm_power(const NormSpec& spec, double s, VectorRef z,
                               double rel_tol = 1e-8);

/// Throws NonFiniteInput if any coordinate is NaN or infinite.
void require_finite(VectorRef x, const char* what);

}  // namespace starmd
