#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>
#include <vector>

namespace hcop {

using Rational = boost::multiprecision::cpp_rational;

/// Parameters of the uncountable-level-set theorem's hypothesis set, with
/// geometric coefficient rule |a_n| = a1 * ratio^{n-1} and frequency rule
/// lambda_n = 2*pi * nu_base^n (closed-form tails require the geometric
/// shape; anything else is rejected).
struct BelovParams {
  Rational alpha{1, 8};
  Rational beta{7};
  Rational lambda{512};   // frequency-ratio lower bound
  Rational M{0};
  Rational a1{1};         // |a_1|
  Rational ratio{1, 8};   // |a_{n+1}|/|a_n|
  Rational nu_base{512};  // lambda_n = 2*pi*nu_base^n

  static BelovParams paper();
};

struct BelovRecord {
  std::string check;  // which inequality
  int m = 0;          // index, or -1 for index-independent/boundary checks
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
  double margin = 0.0;  // rhs - lhs at the 2*pi interval midpoint
  bool exact_equality = false;
};

struct BelovReport {
  std::vector<BelovRecord> records;
  bool all_pass = true;
  std::string to_json() const;
};

/// Verifies, in exact rational arithmetic for each m <= m_max:
///   alpha (1 + beta) <= 1
///   lambda_{m+1} / lambda_m >= lambda
///   |a_m| <= beta * sum_{n > m} |a_n|
///   2*pi (lambda-1)/(lambda-2) (M + sum_{n<=m} |a_n| lambda_n)
///       <= alpha |a_{m+1}| lambda_{m+1}
/// plus the boundary constants beta/(1+beta) * sum |a_n| and
/// (1 - alpha) * sum |a_n| (compared against 1). Where 2*pi appears
/// inhomogeneously it is bounded by the rational interval
/// [6.28318530717958, 6.28318530717959].
BelovReport belov_check(const BelovParams& p, int m_max);

}  // namespace hcop
