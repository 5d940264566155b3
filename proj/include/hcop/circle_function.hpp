#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>

#include "hcop/binary_angle.hpp"
#include "hcop/laurent.hpp"

namespace hcop {

/// Continuity certificate |f(z) - f(w)| <= C |z - w|^alpha (chordal metric).
struct HolderCert {
  double alpha = 1.0;
  double C = 0.0;
};

/// An evaluable function on the unit circle. Laurent polynomials additionally
/// expose coefficients (exact quadrature, derivative limits); everything else
/// must carry a Hoelder certificate before it can enter the singular
/// conjugate-function integral.
class CircleFunction {
 public:
  virtual ~CircleFunction() = default;
  virtual cplx eval(const BinaryAngle& t) const = 0;
  virtual std::optional<HolderCert> holder() const { return std::nullopt; }
  virtual const LaurentPoly* as_laurent() const { return nullptr; }
};

class LaurentFunction : public CircleFunction {
 public:
  explicit LaurentFunction(LaurentPoly p) : p_(std::move(p)) {}
  cplx eval(const BinaryAngle& t) const override { return p_.eval(t); }
  const LaurentPoly* as_laurent() const override { return &p_; }

 private:
  LaurentPoly p_;
};

/// Approximates  integral over T of  w (f(w) - f(z)) / (z - w)  dmu(w),
/// which equals the negative-frequency part f_-(z) for trigonometric series.
/// M: uniform trapezoid node count (power of two). For Laurent f the
/// integrand is itself a Laurent polynomial and the rule is exact once
/// M exceeds its degree span; nodes falling within one grid cell of z are
/// evaluated through stable divided differences (limit -z f'(z) at w = z).
/// For Hoelder-only f, nodes within eps_sing = 1/M of z are replaced by a
/// geometrically graded local sub-quadrature (32 sub-nodes per side);
/// without a certificate the call is refused (MissingHolderCertificate).
cplx conjugate_integral(const CircleFunction& f, const BinaryAngle& z, int M);

/// max over `num_pairs` sampled pairs of |f(z)-f(w)| / |z-w|^alpha; an
/// empirical lower bound for the Hoelder constant of f.
double holder_ratio_sup(const CircleFunction& f, double alpha, int num_pairs,
                        std::uint64_t rng_seed);

}  // namespace hcop
