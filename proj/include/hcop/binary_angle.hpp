#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <complex>
#include <cstdint>
#include <string>

namespace hcop {

using BigInt = boost::multiprecision::cpp_int;

/// A point of the unit circle stored as a fixed-point binary fraction
/// t in [0,1) with B bits. z = e^{2 pi i t}. Doubling (t -> 2t mod 1)
/// is an exact bit shift, so z -> z^{2^k} never loses phase.
class BinaryAngle {
 public:
  static constexpr int kDefaultBits = 256;

  BinaryAngle() : bits_(kDefaultBits), frac_(0) {}
  BinaryAngle(BigInt frac, int bits);

  static BinaryAngle zero(int bits = kDefaultBits) { return BinaryAngle(0, bits); }
  static BinaryAngle from_double(double t, int bits = kDefaultBits);
  // floor(num * 2^B / den) mod 2^B; exact when den is a power of two.
  static BinaryAngle from_fraction(std::int64_t num, std::int64_t den,
                                   int bits = kDefaultBits);
  static BinaryAngle from_hex(const std::string& hex, int bits = kDefaultBits);

  int bits() const { return bits_; }
  const BigInt& raw() const { return frac_; }

  // Fractional part of 2^k * t, exact. Throws PrecisionExhausted if
  // k > bits - 53 (fewer than 53 meaningful bits would remain).
  BinaryAngle pow2_shift(int k) const;

  // Fractional part of n * t, exact (n may be any integer).
  BinaryAngle times_int(std::int64_t n) const;

  BinaryAngle plus(const BinaryAngle& o) const;   // (t + s) mod 1
  BinaryAngle minus(const BinaryAngle& o) const;  // (t - s) mod 1
  BinaryAngle negated() const;                    // (1 - t) mod 1, i.e. conj angle
  BinaryAngle midpoint_to(const BinaryAngle& o) const;  // t + (o - t)/2 mod 1

  double to_double() const;
  std::complex<double> to_complex() const;
  std::string to_hex() const;  // lowercase hex fraction, bits/4 digits

  bool operator==(const BinaryAngle& o) const { return frac_ == o.frac_; }
  bool operator!=(const BinaryAngle& o) const { return frac_ != o.frac_; }
  bool operator<(const BinaryAngle& o) const { return frac_ < o.frac_; }
  bool operator<=(const BinaryAngle& o) const { return frac_ <= o.frac_; }
  bool operator>(const BinaryAngle& o) const { return frac_ > o.frac_; }

 private:
  int bits_;
  BigInt frac_;  // 0 <= frac_ < 2^bits_
};

// Forward arc length from a to b, in angle units in [0,1).
double forward_gap(const BinaryAngle& a, const BinaryAngle& b);
// min(d, 1-d) for the angle difference d.
double angular_distance(const BinaryAngle& a, const BinaryAngle& b);
// |e^{2 pi i s} - e^{2 pi i t}| = 2|sin(pi (s-t))|.
double chordal_distance(const BinaryAngle& a, const BinaryAngle& b);
// Chordal length of an arc of angular length L in [0,1].
double chordal_of_angle(double arc_length);

}  // namespace hcop
