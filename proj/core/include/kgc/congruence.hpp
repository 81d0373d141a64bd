#pragma once

#include "kgc/field.hpp"

namespace kgc {

// Cauchy data sampled on the label lattice.  Both entries must be
// periodic-compatible; the density floor check happens in the init routines.
struct CauchyData {
    ScalarField psi0;     // initial amplitude
    ScalarField psidot0;  // initial time derivative of the amplitude
};

// Massless congruence: one trajectory per label site of the n-dimensional
// label lattice, plus the conserved label density rho0.
struct CongruenceState {
    double t = 0.0;
    VectorField q;     // positions q^i(a,t), upper index, q(a,0) = a
    VectorField qdot;  // velocities dq^i/dt, upper index
    ScalarField rho0;  // initial density (any sign, bounded away from zero)

    const Lattice& lattice() const { return rho0.lat; }
    int dim() const { return q.ncomp(); }
};

// Massive (reduced) congruence: spatial trajectories plus the extra-dimension
// displacement tau and its rate.  tau carries time units; taudot is the
// dimensionless d tau / dt.  rho0 here is the reduced density rho-bar_0.
struct KgCongruenceState {
    double t = 0.0;
    VectorField q;
    VectorField qdot;
    ScalarField tau;
    ScalarField taudot;
    ScalarField rho0;

    const Lattice& lattice() const { return rho0.lat; }
    int dim() const { return q.ncomp(); }
};

// The t = 0 position field: q^i(a) = a^i at every site.
VectorField identity_positions(const Lattice& lat);

} // namespace kgc
