#pragma once

#include <array>
#include <cmath>

#include "levi/phase.hpp"

namespace levi {

/// Value, gradient and Hessian of the ring-dipole potential at one point.
/// hess is stored fully and mirrored once, so hess[i][j] == hess[j][i]
/// holds exactly.
struct PsiDerivatives {
  double value = 0.0;
  std::array<double, 3> grad{};
  std::array<std::array<double, 3>, 3> hess{};
};

/// Nondimensional magnetostatic potential of a ring dipole (magnetized
/// plate with a centered hole),
///
///   psi = Z/(1+Z^2)^{3/2} - (X^2+Y^2) * (3/4) (2Z^2-3) Z / (1+Z^2)^{7/2},
///
/// with analytic first and second derivatives. Writing rho2 = X^2+Y^2 and
/// psi = f(Z) - rho2 * g(Z), all derivatives reduce to f', f'', g, g', g''.
/// Smooth everywhere: the denominator 1+Z^2 never vanishes.
inline PsiDerivatives psi(double x, double y, double z) {
  const double rho2 = x * x + y * y;
  const double z2 = z * z;
  const double w = 1.0 + z2;
  const double sw = std::sqrt(w);

  const double w32 = w * sw;       // w^{3/2}
  const double w52 = w32 * w;      // w^{5/2}
  const double w72 = w52 * w;      // w^{7/2}
  const double w92 = w72 * w;      // w^{9/2}
  const double w112 = w92 * w;     // w^{11/2}

  const double f = z / w32;
  const double fp = (1.0 - 2.0 * z2) / w52;
  const double fpp = 3.0 * z * (2.0 * z2 - 3.0) / w72;

  const double g = 0.75 * z * (2.0 * z2 - 3.0) / w72;
  const double gp = 0.75 * (-8.0 * z2 * z2 + 24.0 * z2 - 3.0) / w92;
  const double gpp = 3.75 * z * (8.0 * z2 * z2 - 40.0 * z2 + 15.0) / w112;

  PsiDerivatives d;
  d.value = f - rho2 * g;
  d.grad = {-2.0 * x * g, -2.0 * y * g, fp - rho2 * gp};

  d.hess[0][0] = -2.0 * g;
  d.hess[1][1] = -2.0 * g;
  d.hess[2][2] = fpp - rho2 * gpp;
  d.hess[0][1] = 0.0;
  d.hess[0][2] = -2.0 * x * gp;
  d.hess[1][2] = -2.0 * y * gp;
  // mirror the upper triangle
  d.hess[1][0] = d.hess[0][1];
  d.hess[2][0] = d.hess[0][2];
  d.hess[2][1] = d.hess[1][2];

  return d;
}

inline PsiDerivatives psi(const std::array<double, 3>& pos) {
  return psi(pos[0], pos[1], pos[2]);
}

} // namespace levi
