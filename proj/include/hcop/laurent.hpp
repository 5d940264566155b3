#pragma once

#include <complex>
#include <map>
#include <vector>

#include "hcop/binary_angle.hpp"

namespace hcop {

using cplx = std::complex<double>;

/// Finitely supported two-sided coefficient sequence a_n, n in [-N, N].
class LaurentPoly {
 public:
  LaurentPoly() = default;
  explicit LaurentPoly(std::map<int, cplx> coeffs);

  static LaurentPoly monomial(int n, cplx a = 1.0);
  static LaurentPoly constant(cplx a);

  const std::map<int, cplx>& coeffs() const { return coeffs_; }
  cplx coeff(int n) const;
  void set_coeff(int n, cplx a);
  int degree_bound() const;  // max |n| over support (0 for the zero poly)

  cplx eval(const BinaryAngle& t) const;  // exact phases via times_int
  cplx eval(cplx z) const;                // plain complex Horner-style sum

  // Values on the uniform 2^k-style grid of M nodes t_j = j/M, computed from a
  // single root-of-unity table: f(z_j) = sum_n a_n w[(j*n) mod M].
  std::vector<cplx> eval_on_uniform_grid(int M) const;

  LaurentPoly derivative() const;     // d/dz: n a_n z^{n-1}
  LaurentPoly negative_part() const;  // keep n <= -1
  LaurentPoly fejer_sum(int n) const; // (1 - |j|/(n+1)) a_j, |j| <= n

  LaurentPoly operator+(const LaurentPoly& o) const;
  LaurentPoly operator-(const LaurentPoly& o) const;
  LaurentPoly operator*(cplx s) const;

 private:
  std::map<int, cplx> coeffs_;  // nonzero coefficients only
  void prune();
};

// (w^n - z^n)/(z - w) evaluated stably via the geometric-sum identity;
// safe when w is close to (or equal to) z.
cplx monomial_divided_diff(int n, cplx z, cplx w);

}  // namespace hcop
