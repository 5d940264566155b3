#include "hcop/laurent.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>

namespace hcop {

LaurentPoly::LaurentPoly(std::map<int, cplx> coeffs) : coeffs_(std::move(coeffs)) {
  prune();
}

void LaurentPoly::prune() {
  for (auto it = coeffs_.begin(); it != coeffs_.end();) {
    if (it->second == cplx(0.0, 0.0)) it = coeffs_.erase(it);
    else ++it;
  }
}

LaurentPoly LaurentPoly::monomial(int n, cplx a) {
  LaurentPoly p;
  p.set_coeff(n, a);
  return p;
}

LaurentPoly LaurentPoly::constant(cplx a) { return monomial(0, a); }

cplx LaurentPoly::coeff(int n) const {
  auto it = coeffs_.find(n);
  return it == coeffs_.end() ? cplx(0.0) : it->second;
}

void LaurentPoly::set_coeff(int n, cplx a) {
  if (a == cplx(0.0)) coeffs_.erase(n);
  else coeffs_[n] = a;
}

int LaurentPoly::degree_bound() const {
  int d = 0;
  for (const auto& [n, a] : coeffs_) d = std::max(d, std::abs(n));
  return d;
}

cplx LaurentPoly::eval(const BinaryAngle& t) const {
  cplx s = 0.0;
  for (const auto& [n, a] : coeffs_) s += a * t.times_int(n).to_complex();
  return s;
}

cplx LaurentPoly::eval(cplx z) const {
  cplx s = 0.0;
  for (const auto& [n, a] : coeffs_) s += a * std::pow(z, n);
  return s;
}

std::vector<cplx> LaurentPoly::eval_on_uniform_grid(int M) const {
  std::vector<cplx> roots(M);
  for (int j = 0; j < M; ++j) {
    double th = 2.0 * std::numbers::pi * j / M;
    roots[j] = {std::cos(th), std::sin(th)};
  }
  std::vector<cplx> out(M, cplx(0.0));
  for (const auto& [n, a] : coeffs_) {
    long long step = ((long long)n % M + M) % M;
    long long idx = 0;
    for (int j = 0; j < M; ++j) {
      out[j] += a * roots[(size_t)idx];
      idx += step;
      if (idx >= M) idx -= M;
    }
  }
  return out;
}

LaurentPoly LaurentPoly::derivative() const {
  LaurentPoly d;
  for (const auto& [n, a] : coeffs_)
    if (n != 0) d.set_coeff(n - 1, a * double(n));
  return d;
}

LaurentPoly LaurentPoly::negative_part() const {
  LaurentPoly q;
  for (const auto& [n, a] : coeffs_)
    if (n <= -1) q.set_coeff(n, a);
  return q;
}

LaurentPoly LaurentPoly::fejer_sum(int n) const {
  LaurentPoly p;
  for (const auto& [j, a] : coeffs_)
    if (std::abs(j) <= n) p.set_coeff(j, a * (1.0 - double(std::abs(j)) / (n + 1)));
  return p;
}

LaurentPoly LaurentPoly::operator+(const LaurentPoly& o) const {
  LaurentPoly r = *this;
  for (const auto& [n, a] : o.coeffs_) r.set_coeff(n, r.coeff(n) + a);
  return r;
}

LaurentPoly LaurentPoly::operator-(const LaurentPoly& o) const {
  LaurentPoly r = *this;
  for (const auto& [n, a] : o.coeffs_) r.set_coeff(n, r.coeff(n) - a);
  return r;
}

LaurentPoly LaurentPoly::operator*(cplx s) const {
  LaurentPoly r;
  for (const auto& [n, a] : coeffs_) r.set_coeff(n, a * s);
  return r;
}

cplx monomial_divided_diff(int n, cplx z, cplx w) {
  // (w^n - z^n)/(z - w).
  if (n == 0) return 0.0;
  if (n > 0) {
    // w^n - z^n = (w - z) * sum_{k=0}^{n-1} w^k z^{n-1-k}
    cplx s = 0.0, wk = 1.0;
    cplx zpow = std::pow(z, n - 1);
    cplx zinv = 1.0 / z;
    for (int k = 0; k < n; ++k) {
      s += wk * zpow;
      wk *= w;
      zpow *= zinv;
    }
    return -s;
  }
  // n < 0: (w^n - z^n) = w^n z^n (z^m - w^m) with m = -n.
  int m = -n;
  cplx s = 0.0, zk = 1.0;
  cplx wpow = std::pow(w, m - 1);
  cplx winv = 1.0 / w;
  for (int k = 0; k < m; ++k) {
    s += zk * wpow;
    zk *= z;
    wpow *= winv;
  }
  // (z^m - w^m)/(z - w) = s, so result = s * w^{-m} z^{-m}.
  return s * std::pow(w, -m) * std::pow(z, -m);
}

}  // namespace hcop
