#pragma once

#include <cmath>
#include <functional>
#include <utility>

#include <Eigen/Dense>

#include "levi/errors.hpp"
#include "levi/model.hpp"
#include "levi/phase.hpp"

namespace levi {

struct NewtonResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double residual_norm = 0.0;
};

/// Damped Newton iteration F(x) = 0 for a general R^n -> R^n residual.
/// The Jacobian is approximated by forward differences with perturbation
/// 1e-7 * max(1, |x_j|); each update is halved until the residual norm
/// decreases (at most 30 halvings). Stops when ||F|| <= tol.
template <typename F>
NewtonResult newton_solve(F&& residual, Eigen::VectorXd x, double tol,
                          int max_iters = 50) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;

  const auto n = x.size();
  VectorXd fx = residual(x);
  double fnorm = fx.norm();

  NewtonResult out;
  for (int iter = 1; iter <= max_iters; ++iter) {
    if (fnorm <= tol) {
      out.x = std::move(x);
      out.iterations = iter - 1;
      out.residual_norm = fnorm;
      return out;
    }

    MatrixXd jac(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double dx = 1e-7 * std::max(1.0, std::abs(x[j]));
      VectorXd xp = x;
      xp[j] += dx;
      jac.col(j) = (residual(xp) - fx) / dx;
    }

    Eigen::FullPivLU<MatrixXd> lu(jac);
    if (!lu.isInvertible())
      throw SingularJacobianError("newton: Jacobian is singular");
    const VectorXd delta = lu.solve(-fx);

    // halving line search on the residual norm
    double lambda = 1.0;
    VectorXd x_try;
    VectorXd f_try;
    double fnorm_try = fnorm;
    for (int halvings = 0; halvings <= 30; ++halvings) {
      x_try = x + lambda * delta;
      f_try = residual(x_try);
      fnorm_try = f_try.norm();
      if (fnorm_try < fnorm || fnorm_try <= tol) break;
      lambda *= 0.5;
    }
    x = std::move(x_try);
    fx = std::move(f_try);
    fnorm = fnorm_try;
  }

  if (fnorm <= tol) {
    out.x = std::move(x);
    out.iterations = max_iters;
    out.residual_norm = fnorm;
    return out;
  }
  throw MaxIterationsError("newton: no convergence within iteration budget");
}

namespace detail {

inline Eigen::VectorXd pack(const PhaseState& s) {
  Eigen::VectorXd x(12);
  for (int i = 0; i < 6; ++i) {
    x[i] = s.q[i];
    x[6 + i] = s.p[i];
  }
  return x;
}

inline PhaseState unpack(const Eigen::VectorXd& x, double t) {
  PhaseState s;
  for (int i = 0; i < 6; ++i) {
    s.q[i] = x[i];
    s.p[i] = x[6 + i];
  }
  s.t = t;
  return s;
}

} // namespace detail

/// Implicit-midpoint step solved by damped Newton on the 12-dimensional
/// residual R(y) = y - x - h f((x+y)/2), f = (dH_dp, -dH_dq). The returned
/// state is the explicit update x + h f((x+y*)/2) at the solved midpoint,
/// so the discrete update equations hold to evaluation precision; in
/// particular the cyclic momentum p6 is preserved bit-exactly.
template <HamiltonianModel M>
PhaseState newton_implicit_step(const M& model, const PhaseState& s, double h,
                                double tol = 1e-4, int max_iters = 50) {
  const Eigen::VectorXd x0 = detail::pack(s);

  auto vector_field = [&model](const Eigen::VectorXd& x,
                               double t) -> Eigen::VectorXd {
    const PhaseState st = detail::unpack(x, t);
    const Vec6 dq = model.dH_dp(st);
    const Vec6 dp = model.dH_dq(st);
    Eigen::VectorXd f(12);
    for (int i = 0; i < 6; ++i) {
      f[i] = dq[i];
      f[6 + i] = -dp[i];
    }
    return f;
  };
  auto residual = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return y - x0 - h * vector_field(0.5 * (x0 + y), s.t + 0.5 * h);
  };

  // solve a bit past tol so the explicit final update stays within it
  const NewtonResult sol = newton_solve(residual, x0, 0.25 * tol, max_iters);

  const Eigen::VectorXd f_mid =
      vector_field(0.5 * (x0 + sol.x), s.t + 0.5 * h);
  PhaseState out = s;
  for (int i = 0; i < 6; ++i) {
    out.q[i] = s.q[i] + h * f_mid[i];
    out.p[i] = s.p[i] + h * f_mid[6 + i];
  }
  out.t = s.t + h;
  return out;
}

} // namespace levi
