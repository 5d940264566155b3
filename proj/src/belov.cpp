#include "hcop/belov.hpp"

#include <array>

#include <nlohmann/json.hpp>

#include "hcop/errors.hpp"

namespace hcop {

namespace {

const Rational kTwoPiLo = Rational(628318530717958LL, 100000000000000LL);
const Rational kTwoPiHi = Rational(628318530717959LL, 100000000000000LL);

Rational rpow(const Rational& b, int e) {
  Rational r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// Quadratic polynomial in x = 2*pi with rational coefficients.
struct PiPoly {
  std::array<Rational, 3> c{Rational(0), Rational(0), Rational(0)};
  Rational eval(const Rational& x) const { return c[0] + c[1] * x + c[2] * x * x; }
};

// Exact minimum of a quadratic over [lo, hi].
Rational min_over_interval(const PiPoly& p, const Rational& lo, const Rational& hi) {
  Rational best = p.eval(lo);
  Rational at_hi = p.eval(hi);
  if (at_hi < best) best = at_hi;
  if (p.c[2] != 0) {
    Rational vertex = -p.c[1] / (2 * p.c[2]);
    if (p.c[2] > 0 && vertex > lo && vertex < hi) {
      Rational v = p.eval(vertex);
      if (v < best) best = v;
    }
  }
  return best;
}

BelovRecord make_record(const std::string& check, int m, const PiPoly& lhs,
                        const PiPoly& rhs) {
  PiPoly diff;
  for (int i = 0; i < 3; ++i) diff.c[i] = rhs.c[i] - lhs.c[i];
  Rational mn = min_over_interval(diff, kTwoPiLo, kTwoPiHi);
  Rational mid = (kTwoPiLo + kTwoPiHi) / 2;
  BelovRecord r;
  r.check = check;
  r.m = m;
  r.lhs = static_cast<double>(lhs.eval(mid));
  r.rhs = static_cast<double>(rhs.eval(mid));
  r.pass = mn >= 0;
  r.margin = static_cast<double>(diff.eval(mid));
  r.exact_equality =
      diff.c[1] == 0 && diff.c[2] == 0 && diff.c[0] == 0;
  return r;
}

PiPoly constant(const Rational& v) {
  PiPoly p;
  p.c[0] = v;
  return p;
}

}  // namespace

BelovParams BelovParams::paper() { return BelovParams{}; }

BelovReport belov_check(const BelovParams& p, int m_max) {
  if (!(p.ratio > 0 && p.ratio < 1))
    throw UnsupportedExponent(
        "belov_check: coefficient rule must be geometric with ratio in (0,1)");
  if (!(p.lambda > 2)) throw Error("belov_check: need lambda > 2");

  BelovReport rep;
  auto push = [&rep](BelovRecord r) {
    rep.all_pass = rep.all_pass && r.pass;
    rep.records.push_back(std::move(r));
  };

  // sum_{n>=1} |a_n| = a1 / (1 - ratio); sum_{n>m} |a_n| = a_{m+1} / (1 - ratio).
  const Rational total = p.a1 / (1 - p.ratio);

  push(make_record("alpha_times_one_plus_beta_le_1", -1,
                   constant(p.alpha * (1 + p.beta)), constant(Rational(1))));
  push(make_record("boundary_beta_fraction_times_sum", -1,
                   constant(p.beta / (1 + p.beta) * total), constant(Rational(1))));
  push(make_record("boundary_one_minus_alpha_times_sum", -1,
                   constant((1 - p.alpha) * total), constant(Rational(1))));

  for (int m = 1; m <= m_max; ++m) {
    const Rational a_m = p.a1 * rpow(p.ratio, m - 1);
    const Rational a_m1 = a_m * p.ratio;

    // lambda_{m+1}/lambda_m = nu_base >= lambda (2*pi cancels).
    push(make_record("lambda_le_frequency_ratio", m, constant(p.lambda),
                     constant(p.nu_base)));

    // |a_m| <= beta * sum_{n>m} |a_n|, with the exact geometric tail.
    push(make_record("coefficient_tail", m, constant(a_m),
                     constant(p.beta * a_m1 / (1 - p.ratio))));

    // 2*pi (lambda-1)/(lambda-2) (M + sum_{n<=m} |a_n| lambda_n)
    //   <= alpha |a_{m+1}| lambda_{m+1},  lambda_n = 2*pi*nu_base^n.
    Rational partial = 0;  // sum_{n<=m} |a_n| nu_base^n
    Rational a_n = p.a1;
    for (int n = 1; n <= m; ++n) {
      partial += a_n * rpow(p.nu_base, n);
      a_n *= p.ratio;
    }
    const Rational k = (p.lambda - 1) / (p.lambda - 2);
    PiPoly lhs;  // 2*pi*k*M + (2*pi)^2*k*partial
    lhs.c[1] = k * p.M;
    lhs.c[2] = k * partial;
    PiPoly rhs;  // alpha*a_{m+1}*2*pi*nu^{m+1}
    rhs.c[1] = p.alpha * a_m1 * rpow(p.nu_base, m + 1);
    push(make_record("growth", m, lhs, rhs));
  }
  return rep;
}

std::string BelovReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) {
    arr.push_back({{"check", r.check},
                   {"m", r.m},
                   {"lhs", r.lhs},
                   {"rhs", r.rhs},
                   {"pass", r.pass},
                   {"margin", r.margin},
                   {"exact_equality", r.exact_equality}});
  }
  nlohmann::json out = {{"records", arr}, {"all_pass", all_pass}};
  return out.dump(2);
}

}  // namespace hcop
