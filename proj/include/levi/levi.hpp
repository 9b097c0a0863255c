#pragma once

// Umbrella header: geometric integration for the Levitron spinning-top
// Hamiltonian -- splitting kernels, iterative and Newton steps,
// multi-product extrapolation, and the experiment harness.

#include "levi/errors.hpp"
#include "levi/harness.hpp"
#include "levi/integrators.hpp"
#include "levi/levitron.hpp"
#include "levi/model.hpp"
#include "levi/mpe.hpp"
#include "levi/newton.hpp"
#include "levi/oscillator.hpp"
#include "levi/phase.hpp"
#include "levi/rational.hpp"
#include "levi/ring_dipole.hpp"
