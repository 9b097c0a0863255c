#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace levi {

/// Fixed-size 6-vector used for generalized coordinates and momenta.
struct Vec6 {
  std::array<double, 6> a{};

  double& operator[](std::size_t i) { return a[i]; }
  double operator[](std::size_t i) const { return a[i]; }

  static constexpr std::size_t size() { return 6; }

  Vec6& operator+=(const Vec6& o) {
    for (std::size_t i = 0; i < 6; ++i) a[i] += o.a[i];
    return *this;
  }
  Vec6& operator-=(const Vec6& o) {
    for (std::size_t i = 0; i < 6; ++i) a[i] -= o.a[i];
    return *this;
  }
  Vec6& operator*=(double s) {
    for (std::size_t i = 0; i < 6; ++i) a[i] *= s;
    return *this;
  }

  friend Vec6 operator+(Vec6 x, const Vec6& y) { return x += y; }
  friend Vec6 operator-(Vec6 x, const Vec6& y) { return x -= y; }
  friend Vec6 operator*(double s, Vec6 x) { return x *= s; }
  friend Vec6 operator*(Vec6 x, double s) { return x *= s; }

  friend bool operator==(const Vec6&, const Vec6&) = default;
};

inline double norm(const Vec6& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < 6; ++i) s += v[i] * v[i];
  return std::sqrt(s);
}

inline double max_abs(const Vec6& v) {
  double m = 0.0;
  for (std::size_t i = 0; i < 6; ++i) m = std::max(m, std::abs(v[i]));
  return m;
}

inline bool all_finite(const Vec6& v) {
  for (std::size_t i = 0; i < 6; ++i)
    if (!std::isfinite(v[i])) return false;
  return true;
}

/// A point of the 12-dimensional phase space plus the carried time.
///
/// q = (X, Y, Z, theta, azimuth angle, spin angle) in nondimensional units,
/// p = conjugate momenta, t in units of sqrt(R/g).
struct PhaseState {
  Vec6 q{};
  Vec6 p{};
  double t = 0.0;

  friend bool operator==(const PhaseState&, const PhaseState&) = default;
};

inline bool all_finite(const PhaseState& s) {
  return all_finite(s.q) && all_finite(s.p) && std::isfinite(s.t);
}

} // namespace levi
