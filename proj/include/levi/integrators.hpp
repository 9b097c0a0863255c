#pragma once

#include <algorithm>
#include <cmath>

#include "levi/errors.hpp"
#include "levi/model.hpp"
#include "levi/phase.hpp"

namespace levi {

// ---------------------------------------------------------------------------
// Splitting shift operators

enum class ShiftKind { A, B };

/// One frozen-coefficient shift of the splitting scheme. An A-shift moves q
/// by h * dH_dp and never touches p; a B-shift moves p by -h * dH_dq and
/// never touches q. The gradient is supplied by the caller, which is where
/// all freezing decisions live.
struct SplittingOperator {
  ShiftKind kind;
  Vec6 gradient;

  PhaseState apply(const PhaseState& s, double h) const {
    PhaseState out = s;
    if (kind == ShiftKind::A)
      out.q += h * gradient;
    else
      out.p -= h * gradient;
    return out;
  }
};

// ---------------------------------------------------------------------------
// Explicit reference steppers

/// Single explicit Euler step; first-order baseline and the cheap
/// initialization of the iterative schemes.
template <HamiltonianModel M>
PhaseState euler_step(const M& model, const PhaseState& s, double h) {
  PhaseState out = s;
  out.q += h * model.dH_dp(s);
  out.p -= h * model.dH_dq(s);
  out.t = s.t + h;
  return out;
}

/// Classic four-stage explicit Runge-Kutta step on
/// (qdot, pdot) = (dH_dp, -dH_dq).
template <HamiltonianModel M>
PhaseState rk4_step(const M& model, const PhaseState& s, double h) {
  struct Deriv {
    Vec6 dq, dp;
  };
  auto f = [&model](const PhaseState& x) -> Deriv {
    return {model.dH_dp(x), -1.0 * model.dH_dq(x)};
  };
  auto at = [&s](const Deriv& k, double scale) -> PhaseState {
    PhaseState x = s;
    x.q += scale * k.dq;
    x.p += scale * k.dp;
    return x;
  };
  const Deriv k1 = f(s);
  const Deriv k2 = f(at(k1, 0.5 * h));
  const Deriv k3 = f(at(k2, 0.5 * h));
  const Deriv k4 = f(at(k3, h));

  PhaseState out = s;
  out.q += (h / 6.0) * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq);
  out.p += (h / 6.0) * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
  out.t = s.t + h;
  return out;
}

// ---------------------------------------------------------------------------
// Verlet for separable Hamiltonians

/// Exact kick-drift-kick composition e^{(h/2)B} e^{hA} e^{(h/2)B} for a
/// separable model, where both shifts are exact flows. Symplectic and
/// time-reversible.
template <HamiltonianModel M>
PhaseState verlet_separable_step(const M& model, const PhaseState& s,
                                 double h) {
  if constexpr (!is_separable_v<M>)
    throw NonSeparableError(
        "verlet_separable_step requires a separable Hamiltonian");
  else {
    PhaseState x =
        SplittingOperator{ShiftKind::B, model.dH_dq(s)}.apply(s, 0.5 * h);
    x = SplittingOperator{ShiftKind::A, model.dH_dp(x)}.apply(x, h);
    x = SplittingOperator{ShiftKind::B, model.dH_dq(x)}.apply(x, 0.5 * h);
    x.t = s.t + h;
    return x;
  }
}

// ---------------------------------------------------------------------------
// Iterative Verlet for non-separable Hamiltonians

enum class InitScheme { PreviousStep, ExplicitEuler, Rk4 };

enum class VerletForm { VV, PV };

/// Controls the fixed-point iteration of the decoupled step.
struct IterationConfig {
  int max_iters = 4;        // I
  double tol = 1e-4;        // err
  InitScheme init = InitScheme::PreviousStep;
  int series_terms = 1;     // N; the exact-shift realization makes N > 1 a no-op

  void validate() const {
    if (max_iters < 1) throw ValidationError("iteration: max_iters must be >= 1");
    if (!(tol > 0.0)) throw ValidationError("iteration: tol must be > 0");
    if (series_terms < 1)
      throw ValidationError("iteration: series_terms must be >= 1");
  }
};

/// Result of one iterative step. Satisfies
/// final_residual <= tol  OR  iterations_used == max_iters.
struct StepReport {
  PhaseState new_state;
  int iterations_used = 0;
  double final_residual = 0.0;
};

namespace detail {

/// One velocity-Verlet sweep with the p-dependence of the first kick frozen
/// at the outer iterate `p_frozen`; every other gradient argument is the
/// current stage value. For a separable model this is exactly the classic
/// Verlet step for any iterate, which is what makes the fixed-point
/// iteration stationary there.
template <HamiltonianModel M>
PhaseState vv_sweep(const M& model, const PhaseState& s, double h,
                    const Vec6& p_frozen) {
  PhaseState probe = s;
  probe.p = p_frozen;
  PhaseState x =
      SplittingOperator{ShiftKind::B, model.dH_dq(probe)}.apply(s, 0.5 * h);
  x = SplittingOperator{ShiftKind::A, model.dH_dp(x)}.apply(x, h);
  x = SplittingOperator{ShiftKind::B, model.dH_dq(x)}.apply(x, 0.5 * h);
  x.t = s.t + h;
  return x;
}

/// Position-form analog: the q-dependence of the first drift is frozen at
/// the outer iterate `q_frozen`.
template <HamiltonianModel M>
PhaseState pv_sweep(const M& model, const PhaseState& s, double h,
                    const Vec6& q_frozen) {
  PhaseState probe = s;
  probe.q = q_frozen;
  PhaseState x =
      SplittingOperator{ShiftKind::A, model.dH_dp(probe)}.apply(s, 0.5 * h);
  x = SplittingOperator{ShiftKind::B, model.dH_dq(x)}.apply(x, h);
  x = SplittingOperator{ShiftKind::A, model.dH_dp(x)}.apply(x, 0.5 * h);
  x.t = s.t + h;
  return x;
}

template <HamiltonianModel M>
PhaseState initial_iterate(const M& model, const PhaseState& s, double h,
                           InitScheme init) {
  switch (init) {
    case InitScheme::ExplicitEuler: return euler_step(model, s, h);
    case InitScheme::Rk4: return rk4_step(model, s, h);
    case InitScheme::PreviousStep:
    default: return s;
  }
}

inline double iterate_residual(const PhaseState& cur, const PhaseState& prev) {
  return std::max(norm(cur.p - prev.p), norm(cur.q - prev.q));
}

} // namespace detail

/// Iterative Verlet step (velocity or position form) for a general
/// Hamiltonian. Each sweep re-runs the frozen-shift composition with the
/// first shift's gradient taken at the previous iterate of the end state;
/// the loop stops when successive iterates differ by at most cfg.tol (max
/// of the Euclidean p- and q-block norms) or after cfg.max_iters sweeps.
/// Non-convergence is reported, not fatal.
template <HamiltonianModel M>
StepReport verlet_step(const M& model, const PhaseState& s, double h,
                       const IterationConfig& cfg = {},
                       VerletForm form = VerletForm::VV) {
  cfg.validate();
  if (h == 0.0) throw ValidationError("verlet_step: h must be nonzero");

  PhaseState prev = detail::initial_iterate(model, s, h, cfg.init);
  StepReport rep;
  for (int i = 1; i <= cfg.max_iters; ++i) {
    const PhaseState cur = (form == VerletForm::VV)
                               ? detail::vv_sweep(model, s, h, prev.p)
                               : detail::pv_sweep(model, s, h, prev.q);
    rep.iterations_used = i;
    rep.final_residual = detail::iterate_residual(cur, prev);
    prev = cur;
    if (rep.final_residual <= cfg.tol) break;
  }
  rep.new_state = prev;
  return rep;
}

} // namespace levi
