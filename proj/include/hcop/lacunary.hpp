#pragma once

#include <complex>
#include <memory>

#include "hcop/binary_angle.hpp"
#include "hcop/circle_function.hpp"

namespace hcop {

/// Truncation of gamma(z) = sum_{n>=1} a_base^{1-n} z^{b_base^n} after N
/// terms, with b_base a power of two so that every z^{b_base^n} is an exact
/// angle shift. Production parameters: a_base = 8, b_base = 2^9, N = 12.
struct LacunarySeries {
  double a_base = 8.0;
  int b_log2 = 9;  // b_base = 2^b_log2
  int N = 12;

  // |sum_{n>N} 8^{1-n} z^{2^{9n}}| <= a_base^{1-N}/(a_base - 1); for the
  // production base this is 8^{1-N}/7.
  double tail() const;

  // Requires b_log2*N + 53 <= t.bits() (angle_pow2 precondition).
  std::pair<cplx, double> gamma_eval(const BinaryAngle& t) const;
  std::pair<cplx, double> psi_eval(const BinaryAngle& t) const;  // gamma(z)+gamma(conj z)

  // Upper bound for |gamma(z) - gamma(w)| over chordal |z - w| <= r, from
  // |z^m - w^m| <= min(2, m |z - w|) applied term by term.
  double var_bound(double r) const;
};

/// alpha = log_b a and the explicit constant from the lacunary Hoelder proof:
/// C = a 2^{-alpha}/(b-a) + 2a (2b)^{1-alpha}/(a-1).
std::pair<double, double> holder_constant(double a, double b);

/// gamma as a CircleFunction carrying its Hoelder certificate.
class GammaFunction : public CircleFunction {
 public:
  explicit GammaFunction(LacunarySeries s) : s_(s) {}
  cplx eval(const BinaryAngle& t) const override { return s_.gamma_eval(t).first; }
  std::optional<HolderCert> holder() const override {
    auto [alpha, C] = holder_constant(s_.a_base, std::ldexp(1.0, s_.b_log2));
    return HolderCert{alpha, C};
  }
  const LacunarySeries& series() const { return s_; }

 private:
  LacunarySeries s_;
};

/// Abstraction used by the level-set machinery: an evaluable function with a
/// variation bound over small arcs and a truncation-tail bound.
class LevelFunction {
 public:
  virtual ~LevelFunction() = default;
  virtual cplx eval(const BinaryAngle& t) const = 0;
  virtual double var_bound(double chordal_r) const = 0;
  virtual double tail() const = 0;
};

class GammaLevel : public LevelFunction {
 public:
  explicit GammaLevel(LacunarySeries s) : s_(s) {}
  cplx eval(const BinaryAngle& t) const override { return s_.gamma_eval(t).first; }
  double var_bound(double r) const override { return s_.var_bound(r); }
  double tail() const override { return s_.tail(); }
  const LacunarySeries& series() const { return s_; }

 private:
  LacunarySeries s_;
};

// Test hooks for the classifier.
class ConstantLevel : public LevelFunction {
 public:
  explicit ConstantLevel(cplx v) : v_(v) {}
  cplx eval(const BinaryAngle&) const override { return v_; }
  double var_bound(double) const override { return 0.0; }
  double tail() const override { return 0.0; }

 private:
  cplx v_;
};

class IdentityLevel : public LevelFunction {  // f(z) = z
 public:
  cplx eval(const BinaryAngle& t) const override { return t.to_complex(); }
  double var_bound(double r) const override { return r; }
  double tail() const override { return 0.0; }
};

}  // namespace hcop
