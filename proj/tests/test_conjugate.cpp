#include <random>

#include "doctest.h"
#include "hcop/circle_function.hpp"
#include "hcop/errors.hpp"
#include "hcop/laurent.hpp"

using namespace hcop;

namespace {

LaurentPoly random_poly(int deg, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::map<int, cplx> c;
  for (int n = -deg; n <= deg; ++n) c[n] = cplx(u(rng), u(rng));
  return LaurentPoly(std::move(c));
}

}  // namespace

TEST_CASE("conjugate integral recovers the negative-frequency part") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> pick(0, (1 << 20) - 1);
  for (int trial = 0; trial < 5; ++trial) {
    const LaurentPoly f = random_poly(16 + 4 * trial, rng);
    const LaurentFunction ff(f);
    const LaurentPoly fm = f.negative_part();
    for (int k = 0; k < 20; ++k) {
      const BinaryAngle z = BinaryAngle::from_fraction(pick(rng), 1 << 20);
      const cplx got = conjugate_integral(ff, z, 4096);
      const cplx want = fm.eval(z);
      CHECK(std::abs(got - want) <= 1e-10);
    }
  }
}

TEST_CASE("node collision with z goes through the derivative limit") {
  const LaurentPoly f = LaurentPoly::monomial(-3, cplx(0.5, -0.25)) +
                        LaurentPoly::monomial(2, cplx(1.0, 0.0));
  const LaurentFunction ff(f);
  // z exactly on a trapezoid node of the M = 4096 rule.
  const BinaryAngle z = BinaryAngle::from_fraction(17, 4096);
  const cplx got = conjugate_integral(ff, z, 4096);
  const cplx want = f.negative_part().eval(z);
  CHECK(std::abs(got - want) <= 1e-10);
}

TEST_CASE("non-Laurent functions need a Hoelder certificate") {
  struct Bare : CircleFunction {
    cplx eval(const BinaryAngle& t) const override { return t.to_complex(); }
  } bare;
  CHECK_THROWS_AS(conjugate_integral(bare, BinaryAngle::from_fraction(1, 3), 1024),
                  MissingHolderCertificate);
}

TEST_CASE("divided difference is stable at coincident arguments") {
  const cplx z = std::polar(1.0, 0.7);
  const cplx exact = -5.0 * std::pow(z, 4);  // lim (w^5-z^5)/(z-w) = -n z^{n-1}
  CHECK(std::abs(monomial_divided_diff(5, z, z) - exact) <= 1e-13);
}
