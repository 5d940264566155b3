#include "hcop/binary_angle.hpp"

#include <cmath>
#include <numbers>

#include "hcop/errors.hpp"

namespace hcop {

namespace {
BigInt mask_for(int bits) { return (BigInt(1) << bits) - 1; }
}  // namespace

BinaryAngle::BinaryAngle(BigInt frac, int bits) : bits_(bits), frac_(std::move(frac)) {
  if (bits_ <= 0) throw Error("BinaryAngle: bits must be positive");
  frac_ &= mask_for(bits_);
  if (frac_ < 0) frac_ += (BigInt(1) << bits_);
}

BinaryAngle BinaryAngle::from_double(double t, int bits) {
  t -= std::floor(t);
  // Peel off 48 bits at a time to keep exactness of the double's mantissa.
  BigInt acc = 0;
  double rem = t;
  for (int taken = 0; taken < bits; taken += 48) {
    int chunk = std::min(48, bits - taken);
    rem *= std::ldexp(1.0, chunk);
    double ip = std::floor(rem);
    rem -= ip;
    acc = (acc << chunk) + BigInt(static_cast<std::int64_t>(ip));
  }
  return BinaryAngle(acc, bits);
}

BinaryAngle BinaryAngle::from_fraction(std::int64_t num, std::int64_t den, int bits) {
  if (den <= 0) throw Error("BinaryAngle::from_fraction: den must be positive");
  BigInt n = num;
  n %= den;
  if (n < 0) n += den;
  return BinaryAngle((n << bits) / den, bits);
}

BinaryAngle BinaryAngle::from_hex(const std::string& hex, int bits) {
  BigInt v = 0;
  int consumed = 0;
  for (char c : hex) {
    int d;
    if (c >= '0' && c <= '9') d = c - '0';
    else if (c >= 'a' && c <= 'f') d = 10 + (c - 'a');
    else if (c >= 'A' && c <= 'F') d = 10 + (c - 'A');
    else throw Error("BinaryAngle::from_hex: invalid digit");
    v = (v << 4) + d;
    consumed += 4;
  }
  if (consumed < bits) v <<= (bits - consumed);
  else if (consumed > bits) v >>= (consumed - bits);
  return BinaryAngle(v, bits);
}

BinaryAngle BinaryAngle::pow2_shift(int k) const {
  if (k < 0) throw Error("pow2_shift: k must be >= 0");
  if (k > bits_ - 53)
    throw PrecisionExhausted("pow2_shift: shift by " + std::to_string(k) +
                             " exhausts precision B=" + std::to_string(bits_));
  return BinaryAngle(frac_ << k, bits_);
}

BinaryAngle BinaryAngle::times_int(std::int64_t n) const {
  return BinaryAngle(frac_ * n, bits_);
}

BinaryAngle BinaryAngle::plus(const BinaryAngle& o) const {
  return BinaryAngle(frac_ + o.frac_, bits_);
}

BinaryAngle BinaryAngle::minus(const BinaryAngle& o) const {
  return BinaryAngle(frac_ - o.frac_, bits_);
}

BinaryAngle BinaryAngle::negated() const {
  return BinaryAngle(-frac_, bits_);
}

BinaryAngle BinaryAngle::midpoint_to(const BinaryAngle& o) const {
  BigInt d = o.frac_ - frac_;
  d &= mask_for(bits_);
  if (d < 0) d += (BigInt(1) << bits_);
  return BinaryAngle(frac_ + (d >> 1), bits_);
}

double BinaryAngle::to_double() const {
  // Top 96 bits are enough: the result is a double anyway.
  int drop = bits_ > 96 ? bits_ - 96 : 0;
  BigInt top = frac_ >> drop;
  return std::ldexp(top.convert_to<double>(), drop - bits_);
}

std::complex<double> BinaryAngle::to_complex() const {
  double t = to_double();
  double th = 2.0 * std::numbers::pi * t;
  return {std::cos(th), std::sin(th)};
}

std::string BinaryAngle::to_hex() const {
  int digits = (bits_ + 3) / 4;
  std::string out(digits, '0');
  BigInt v = frac_;
  if (bits_ % 4 != 0) v <<= (4 - bits_ % 4);
  for (int i = digits - 1; i >= 0; --i) {
    int d = static_cast<int>(v & 0xf);
    out[i] = d < 10 ? char('0' + d) : char('a' + d - 10);
    v >>= 4;
  }
  return out;
}

double forward_gap(const BinaryAngle& a, const BinaryAngle& b) {
  return b.minus(a).to_double();
}

double angular_distance(const BinaryAngle& a, const BinaryAngle& b) {
  double d = forward_gap(a, b);
  return std::min(d, 1.0 - d);
}

double chordal_distance(const BinaryAngle& a, const BinaryAngle& b) {
  return chordal_of_angle(angular_distance(a, b));
}

double chordal_of_angle(double arc_length) {
  if (arc_length > 0.5) arc_length = 0.5;
  if (arc_length < 0.0) arc_length = 0.0;
  return 2.0 * std::sin(std::numbers::pi * arc_length);
}

}  // namespace hcop
