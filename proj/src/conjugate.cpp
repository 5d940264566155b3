#include <cmath>
#include <numbers>
#include <random>

#include "hcop/circle_function.hpp"
#include "hcop/errors.hpp"

namespace hcop {

namespace {

// Integrand w (f(w) - f(z)) / (z - w) for Laurent f, stable for w near z.
cplx laurent_integrand(const LaurentPoly& f, cplx z, cplx w, cplx fz, cplx fw) {
  if (std::abs(z - w) > 1e-3) return w * (fw - fz) / (z - w);
  cplx s = 0.0;
  for (const auto& [n, a] : f.coeffs()) s += a * monomial_divided_diff(n, z, w);
  return w * s;
}

}  // namespace

cplx conjugate_integral(const CircleFunction& f, const BinaryAngle& z, int M) {
  if (M < 2) throw Error("conjugate_integral: M must be >= 2");
  const cplx zc = z.to_complex();
  const cplx fz = f.eval(z);

  if (const LaurentPoly* p = f.as_laurent()) {
    // The integrand is a Laurent polynomial of degree span < M, so the
    // uniform trapezoid rule is exact up to rounding; no singular handling
    // beyond the stable divided-difference evaluation is needed.
    auto fw = p->eval_on_uniform_grid(M);
    cplx acc = 0.0;
    for (int j = 0; j < M; ++j) {
      double th = 2.0 * std::numbers::pi * j / M;
      cplx w = {std::cos(th), std::sin(th)};
      acc += laurent_integrand(*p, zc, w, fz, fw[j]);
    }
    return acc / double(M);
  }

  if (!f.holder().has_value())
    throw MissingHolderCertificate(
        "conjugate_integral: non-polynomial integrand requires a Hoelder "
        "certificate to control the singular node");

  const double tz = z.to_double();
  const double eps = 1.0 / M;
  cplx acc = 0.0;
  int excluded = 0;
  for (int j = 0; j < M; ++j) {
    double tw = double(j) / M;
    double d = std::abs(tw - tz);
    d = std::min(d, 1.0 - d);
    if (d < eps) {
      ++excluded;
      continue;
    }
    BinaryAngle wa = BinaryAngle::from_fraction(j, M, z.bits());
    cplx w = wa.to_complex();
    acc += w * (f.eval(wa) - fz) / (zc - w) / double(M);
  }

  // Graded local sub-quadrature over the excluded window, 32 geometric
  // sub-intervals per side with midpoint evaluation; the innermost slice is
  // bounded by C r^alpha and dropped.
  double u0 = excluded / (2.0 * M);
  if (u0 > 0.0) {
    for (int side = -1; side <= 1; side += 2) {
      double hi = u0;
      for (int i = 0; i < 32; ++i) {
        double lo = hi * 0.5;
        double mid = 0.5 * (lo + hi);
        BinaryAngle wa = z.plus(BinaryAngle::from_double(side * mid, z.bits()));
        cplx w = wa.to_complex();
        acc += w * (f.eval(wa) - fz) / (zc - w) * (hi - lo);
        hi = lo;
      }
    }
  }
  return acc;
}

double holder_ratio_sup(const CircleFunction& f, double alpha, int num_pairs,
                        std::uint64_t rng_seed) {
  if (alpha <= 0.0 || alpha > 1.0) throw Error("holder_ratio_sup: need 0 < alpha <= 1");
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double best = 0.0;
  for (int i = 0; i < num_pairs; ++i) {
    BinaryAngle a = BinaryAngle::from_double(uni(rng));
    BinaryAngle b = BinaryAngle::from_double(uni(rng));
    double dist = std::abs(a.to_complex() - b.to_complex());
    if (dist < 1e-15) continue;
    double ratio = std::abs(f.eval(a) - f.eval(b)) / std::pow(dist, alpha);
    best = std::max(best, ratio);
  }
  return best;
}

}  // namespace hcop
