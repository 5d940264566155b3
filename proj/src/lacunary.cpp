#include "hcop/lacunary.hpp"

#include <cmath>

#include "hcop/errors.hpp"

namespace hcop {

double LacunarySeries::tail() const {
  return std::pow(a_base, 1.0 - N) / (a_base - 1.0);
}

std::pair<cplx, double> LacunarySeries::gamma_eval(const BinaryAngle& t) const {
  cplx s = 0.0;
  double coef = 1.0;
  for (int n = 1; n <= N; ++n) {
    s += coef * t.pow2_shift(b_log2 * n).to_complex();
    coef /= a_base;
  }
  return {s, tail() + N * std::ldexp(1.0, -50)};
}

std::pair<cplx, double> LacunarySeries::psi_eval(const BinaryAngle& t) const {
  auto [g, e] = gamma_eval(t);
  auto [gc, ec] = gamma_eval(t.negated());
  return {g + gc, e + ec};
}

double LacunarySeries::var_bound(double r) const {
  if (r <= 0.0) return 0.0;
  double s = 0.0;
  double coef = 1.0;
  for (int n = 1; n <= N; ++n) {
    s += coef * std::min(2.0, std::ldexp(r, b_log2 * n));
    coef /= a_base;
  }
  return s;
}

std::pair<double, double> holder_constant(double a, double b) {
  if (!(b > a && a > 1.0)) throw Error("holder_constant: need b > a > 1");
  double alpha = std::log(a) / std::log(b);
  double C = a * std::pow(2.0, -alpha) / (b - a) +
             2.0 * a * std::pow(2.0 * b, 1.0 - alpha) / (a - 1.0);
  return {alpha, C};
}

}  // namespace hcop
