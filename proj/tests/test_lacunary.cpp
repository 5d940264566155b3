#include <cmath>

#include "doctest.h"
#include "hcop/lacunary.hpp"

using namespace hcop;

TEST_CASE("tail bound matches the geometric closed form") {
  LacunarySeries s;  // a = 8, N = 12
  CHECK(s.tail() == doctest::Approx(std::pow(8.0, -11) / 7.0).epsilon(1e-12));
}

TEST_CASE("gamma at angle zero sums the coefficients") {
  LacunarySeries s;
  const auto [v, bar] = s.gamma_eval(BinaryAngle::zero());
  double want = 0.0;
  for (int n = 1; n <= s.N; ++n) want += std::pow(8.0, 1 - n);
  CHECK(std::abs(v - cplx(want, 0.0)) <= 1e-15);
  CHECK(bar <= s.tail() + 1e-12);  // tail plus rounding allowance
}

TEST_CASE("psi is real and even in the angle") {
  LacunarySeries s;
  const BinaryAngle t = BinaryAngle::from_fraction(1234567, 1 << 24);
  const auto [p, bar] = s.psi_eval(t);
  CHECK(std::abs(p.imag()) <= 1e-14);
  const auto [pm, bm] = s.psi_eval(BinaryAngle::zero().minus(t));
  CHECK(std::abs(p - pm) <= 1e-14);
  (void)bar;
  (void)bm;
}

TEST_CASE("Hoelder exponent for the production bases is 1/3") {
  const auto [alpha, C] = holder_constant(8.0, 512.0);
  CHECK(alpha == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(C > 0.0);
}

TEST_CASE("empirical Hoelder ratio stays under the certified constant") {
  LacunarySeries s;
  const GammaFunction g(s);
  const auto cert = g.holder();
  REQUIRE(cert.has_value());
  const double sup = holder_ratio_sup(g, cert->alpha, 2000, 42);
  CHECK(sup > 0.0);
  CHECK(sup <= cert->C);
}

TEST_CASE("variation bound is monotone and dominates samples") {
  LacunarySeries s;
  CHECK(s.var_bound(1e-6) <= s.var_bound(1e-3));
  const BinaryAngle a = BinaryAngle::from_fraction(3, 1 << 18);
  const BinaryAngle b = BinaryAngle::from_fraction(5, 1 << 18);
  const double d = std::abs(a.to_complex() - b.to_complex());
  const double diff = std::abs(s.gamma_eval(a).first - s.gamma_eval(b).first);
  CHECK(diff <= s.var_bound(d) + 1e-15);
}
