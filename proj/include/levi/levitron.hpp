#pragma once

#include <cmath>

#include "levi/errors.hpp"
#include "levi/phase.hpp"
#include "levi/ring_dipole.hpp"

namespace levi {

/// Nondimensional model constants of the spinning top.
///
/// a and c are the transverse and axial moments of inertia scaled by m R^2,
/// M is the ratio of magnetic to gravitational energy. sin_guard is the
/// smallest |sin q4| at which the reduced momenta terms are evaluated;
/// below it the model throws instead of regularizing.
struct LevitronParams {
  double a = 1.0;
  double c = 1.0;
  double M = 0.0;
  double sin_guard = 1e-8;

  void validate() const {
    if (!(a > 0.0) || !(c > 0.0))
      throw ValidationError("levitron: inertia parameters must be positive");
    if (!(M >= 0.0)) throw ValidationError("levitron: M must be >= 0");
    if (!(sin_guard > 0.0 && sin_guard < 1.0))
      throw ValidationError("levitron: sin_guard must be in (0,1)");
  }
};

/// Reduced Hamiltonian of the levitating top,
///
///   H = 1/2 ( p1^2 + p2^2 + p3^2 + p4^2/a
///             + (p5 - p6 cos q4)^2 / (a sin^2 q4) + p6^2/c )
///       - M [ sin q4 (cos q5 dPsi/dq1 + sin q5 dPsi/dq2) + cos q4 dPsi/dq3 ]
///       + q3,
///
/// i.e. the standard symmetric-top kinetic form plus the ring-dipole
/// interaction and gravity. q6 is cyclic, so p6 (the spin momentum) is an
/// exact constant of motion; dH_dq returns a literal 0 for that component.
class LevitronModel {
public:
  static constexpr bool separable = false;

  explicit LevitronModel(LevitronParams params) : prm_(params) {
    prm_.validate();
  }

  const LevitronParams& params() const { return prm_; }

  bool admissible(const PhaseState& s) const {
    return std::abs(std::sin(s.q[3])) >= prm_.sin_guard;
  }

  double energy(const PhaseState& s) const {
    const Trig tr = trig(s);
    const PsiDerivatives d = psi(s.q[0], s.q[1], s.q[2]);
    const double u = s.p[4] - s.p[5] * tr.c4;
    const double kin = 0.5 * (s.p[0] * s.p[0] + s.p[1] * s.p[1] +
                              s.p[2] * s.p[2] + s.p[3] * s.p[3] / prm_.a) +
                       0.5 * u * u / (prm_.a * tr.s4 * tr.s4) +
                       0.5 * s.p[5] * s.p[5] / prm_.c;
    const double axis_dot_grad =
        tr.s4 * (tr.c5 * d.grad[0] + tr.s5 * d.grad[1]) + tr.c4 * d.grad[2];
    return kin - prm_.M * axis_dot_grad + s.q[2];
  }

  Vec6 dH_dp(const PhaseState& s) const {
    const Trig tr = trig(s);
    const double inv_as2 = 1.0 / (prm_.a * tr.s4 * tr.s4);
    const double u = s.p[4] - s.p[5] * tr.c4;
    return Vec6{{s.p[0], s.p[1], s.p[2], s.p[3] / prm_.a, u * inv_as2,
                 s.p[5] / prm_.c - tr.c4 * u * inv_as2}};
  }

  Vec6 dH_dq(const PhaseState& s) const {
    const Trig tr = trig(s);
    const PsiDerivatives d = psi(s.q[0], s.q[1], s.q[2]);
    const double u = s.p[4] - s.p[5] * tr.c4;
    const double as = prm_.a * tr.s4;
    const double M = prm_.M;

    Vec6 g;
    for (int i = 0; i < 3; ++i)
      g[i] = -M * (tr.s4 * (tr.c5 * d.hess[0][i] + tr.s5 * d.hess[1][i]) +
                   tr.c4 * d.hess[2][i]);
    g[2] += 1.0; // gravity
    g[3] = u * s.p[5] / as - u * u * tr.c4 / (as * tr.s4 * tr.s4) -
           M * (tr.c4 * (tr.c5 * d.grad[0] + tr.s5 * d.grad[1]) -
                tr.s4 * d.grad[2]);
    g[4] = M * tr.s4 * (tr.s5 * d.grad[0] - tr.c5 * d.grad[1]);
    g[5] = 0.0; // q6 cyclic
    return g;
  }

private:
  struct Trig {
    double s4, c4, s5, c5;
  };

  Trig trig(const PhaseState& s) const {
    const double s4 = std::sin(s.q[3]);
    if (std::abs(s4) < prm_.sin_guard) throw SingularityError(s4);
    return {s4, std::cos(s.q[3]), std::sin(s.q[4]), std::cos(s.q[4])};
  }

  LevitronParams prm_;
};

/// Vertical force residual -dH/dq3 at the on-axis point (0, 0, z) for a
/// top whose axis is tilted by q4 at azimuth q5, assembled directly from
/// the potential derivatives (valid at exactly q4 = 0, where the full
/// model evaluation would trip the coordinate guard). `gravity` scales the
/// constant gravitational term.
inline double vertical_force_residual(double M, double z, double q4 = 0.0,
                                      double q5 = 0.0, double gravity = 1.0) {
  const PsiDerivatives d = psi(0.0, 0.0, z);
  const double s4 = std::sin(q4), c4 = std::cos(q4);
  const double s5 = std::sin(q5), c5 = std::cos(q5);
  const double coeff =
      s4 * (c5 * d.hess[0][2] + s5 * d.hess[1][2]) + c4 * d.hess[2][2];
  return M * coeff - gravity;
}

/// Solve for the M that makes the vertical force vanish at (0, 0, z_star)
/// with the axis fixed at tilt q4_align. The residual is linear in M, so a
/// single division suffices. Throws NoEquilibriumError when the magnetic
/// coefficient vanishes (no M can balance gravity there).
inline double calibrate_M(double z_star, double q4_align = 0.0,
                          double q5 = 0.0, double gravity = 1.0) {
  if (!(z_star > 0.0)) throw ValidationError("calibrate_M: z_star must be > 0");
  const double coeff = vertical_force_residual(1.0, z_star, q4_align, q5,
                                               gravity) +
                       gravity; // strips gravity: the pure magnetic slope
  if (std::abs(coeff) < 1e-300)
    throw NoEquilibriumError("calibrate_M: magnetic vertical force vanishes");
  return gravity / coeff;
}

/// Start state for a top spinning at rate p6/c about its own axis, placed
/// on the symmetry axis at height z with a small tilt. The azimuthal
/// momentum is set to p5 = p6 cos(tilt), the pure-spin value: anything
/// else injects a large (p5 - p6 cos q4)^2 / sin^2 q4 term at small tilt.
inline PhaseState spinning_start(double z, double tilt, double spin) {
  PhaseState s;
  s.q = Vec6{{0.0, 0.0, z, tilt, 0.0, 0.0}};
  s.p = Vec6{{0.0, 0.0, 0.0, 0.0, spin * std::cos(tilt), spin}};
  return s;
}

} // namespace levi
