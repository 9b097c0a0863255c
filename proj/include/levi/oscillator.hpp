#pragma once

#include <cmath>

#include "levi/errors.hpp"
#include "levi/phase.hpp"

namespace levi {

/// Separable test model: six uncoupled harmonic oscillators,
/// H = |p|^2 / (2 m) + k |q|^2 / 2, with a closed-form solution.
class OscillatorModel {
public:
  static constexpr bool separable = true;

  explicit OscillatorModel(double mass = 1.0, double stiffness = 1.0)
      : m_(mass), k_(stiffness) {
    if (!(m_ > 0.0)) throw ValidationError("oscillator: mass must be > 0");
    if (!(k_ >= 0.0))
      throw ValidationError("oscillator: stiffness must be >= 0");
  }

  double mass() const { return m_; }
  double stiffness() const { return k_; }

  double energy(const PhaseState& s) const {
    double e = 0.0;
    for (std::size_t i = 0; i < 6; ++i)
      e += 0.5 * s.p[i] * s.p[i] / m_ + 0.5 * k_ * s.q[i] * s.q[i];
    return e;
  }

  Vec6 dH_dp(const PhaseState& s) const { return (1.0 / m_) * s.p; }

  Vec6 dH_dq(const PhaseState& s) const { return k_ * s.q; }

  /// Exact flow from `from` over elapsed time dt. For k = 0 this is free
  /// motion.
  PhaseState exact_flow(const PhaseState& from, double dt) const {
    PhaseState out = from;
    out.t = from.t + dt;
    if (k_ == 0.0) {
      out.q = from.q + (dt / m_) * from.p;
      return out;
    }
    const double w = std::sqrt(k_ / m_);
    const double cwt = std::cos(w * dt), swt = std::sin(w * dt);
    for (std::size_t i = 0; i < 6; ++i) {
      out.q[i] = from.q[i] * cwt + from.p[i] / (m_ * w) * swt;
      out.p[i] = -m_ * w * from.q[i] * swt + from.p[i] * cwt;
    }
    return out;
  }

private:
  double m_;
  double k_;
};

} // namespace levi
