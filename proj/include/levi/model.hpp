#pragma once

#include <concepts>

#include "levi/phase.hpp"

namespace levi {

/// Behavioral contract of a Hamiltonian model: total energy plus the two
/// gradients that drive the Poisson-bracket evolution
///   qdot = dH/dp,  pdot = -dH/dq.
template <typename M>
concept HamiltonianModel = requires(const M& m, const PhaseState& s) {
  { m.energy(s) } -> std::convertible_to<double>;
  { m.dH_dp(s) } -> std::convertible_to<Vec6>;
  { m.dH_dq(s) } -> std::convertible_to<Vec6>;
  { M::separable } -> std::convertible_to<bool>;
};

/// True when dH_dq depends only on q and dH_dp only on p, so the split
/// A/B flows are exact shifts.
template <HamiltonianModel M>
inline constexpr bool is_separable_v = M::separable;

} // namespace levi
