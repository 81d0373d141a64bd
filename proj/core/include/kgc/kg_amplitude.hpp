#pragma once

#include <utility>

#include "kgc/congruence.hpp"
#include "kgc/constants.hpp"
#include "kgc/deposit.hpp"

namespace kgc {

// The per-label internal clock T = alpha exp(-tau/alpha) and its rate
// Tdot = -taudot exp(-tau/alpha); T(t=0) = alpha everywhere by construction.
struct InternalClock {
    ScalarField T;
    ScalarField Tdot;
    double alpha = 0.0;
};

InternalClock internal_clock(const KgCongruenceState& s, const PhysicalConstants& pc);

// Amplitude from the congruence in propagator (deposition) form: every label
// scatters the charge -alpha * Tdot * psidot0 * da^d at its current position,
//   psi(x, t) = -alpha sum_a Tdot(a,t) K(x - q(a,t)) psidot0(a) da^d.
// At t = 0 this reproduces psi0 exactly on matching grids because
// -alpha * Tdot0 * psidot0 = psi0.  Throws RegularWindowExceeded when any
// site's |tau| is past tau_bound (the clock has collapsed there).
ScalarField kg_reconstruct(const KgCongruenceState& s, const ScalarField& psidot0,
                           const Lattice& grid, DepositKernel kernel,
                           const PhysicalConstants& pc, double tau_bound);

// The same amplitude through the inverse map instead of deposition:
//   psi(x, t) = (hbar/m) [rho0 exp(-tau/alpha) taudot / J] at the preimage.
// Cross-check route; agrees with kg_reconstruct to kernel order.
ScalarField kg_reconstruct_direct(const KgCongruenceState& s, const Lattice& grid,
                                  const PhysicalConstants& pc, double jacobian_floor,
                                  double tau_bound);

// Complex amplitude from two congruences: the real and imaginary parts are
// the reconstructions of the two states (they never couple in the free
// theory).  Component failures are annotated with which congruence failed.
std::pair<ScalarField, ScalarField> complex_amplitude(
    const KgCongruenceState& s1, const ScalarField& psidot10, const KgCongruenceState& s2,
    const ScalarField& psidot20, const Lattice& grid, DepositKernel kernel,
    const PhysicalConstants& pc, double tau_bound);

} // namespace kgc
