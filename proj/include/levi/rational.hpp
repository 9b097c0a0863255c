#pragma once

#include <cstdint>
#include <string>

#include "levi/errors.hpp"

namespace levi {

/// Exact rational number over 128-bit integers, always stored normalized
/// (positive denominator, gcd 1). Arithmetic checks for overflow and
/// throws rather than wrapping.
class Rational {
public:
  using Int = __int128;

  Rational() = default;
  Rational(long long num) : num_(num), den_(1) {}
  Rational(long long num, long long den) : num_(num), den_(den) {
    normalize();
  }

  static Rational from_int128(Int num, Int den) {
    Rational r;
    r.num_ = num;
    r.den_ = den;
    r.normalize();
    return r;
  }

  Int num() const { return num_; }
  Int den() const { return den_; }

  bool is_zero() const { return num_ == 0; }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  Rational operator-() const { return from_int128(-num_, den_); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return from_int128(
        checked_add(checked_mul(a.num_, b.den_), checked_mul(b.num_, a.den_)),
        checked_mul(a.den_, b.den_));
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return a + (-b);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from_int128(checked_mul(a.num_, b.num_),
                       checked_mul(a.den_, b.den_));
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw ValidationError("rational: division by zero");
    return from_int128(checked_mul(a.num_, b.den_),
                       checked_mul(a.den_, b.num_));
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  /// Decimal "num/den" rendering, mostly for diagnostics.
  std::string str() const {
    return int128_str(num_) + (den_ == 1 ? "" : "/" + int128_str(den_));
  }

private:
  Int num_ = 0;
  Int den_ = 1;

  static Int checked_mul(Int a, Int b) {
    Int r;
    if (__builtin_mul_overflow(a, b, &r))
      throw OverflowError("rational: 128-bit multiply overflow");
    return r;
  }
  static Int checked_add(Int a, Int b) {
    Int r;
    if (__builtin_add_overflow(a, b, &r))
      throw OverflowError("rational: 128-bit add overflow");
    return r;
  }

  static Int gcd(Int a, Int b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      const Int t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  void normalize() {
    if (den_ == 0) throw ValidationError("rational: zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    if (num_ == 0) {
      den_ = 1;
      return;
    }
    const Int g = gcd(num_, den_);
    num_ /= g;
    den_ /= g;
  }

  static std::string int128_str(Int v) {
    if (v == 0) return "0";
    const bool neg = v < 0;
    unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v)
                              : static_cast<unsigned __int128>(v);
    std::string s;
    while (u != 0) {
      s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(u % 10)));
      u /= 10;
    }
    return neg ? "-" + s : s;
  }
};

} // namespace levi
