#pragma once

#include "kgc/congruence.hpp"
#include "kgc/deformation.hpp"
#include "kgc/sim_config.hpp"

namespace kgc {

// Builds the massless congruence from Cauchy data:
//   rho0    = psidot0 / c^2
//   qdot_i  = (d psi0 / da^i) / rho0     (index then raised with the metric)
// Throws DegenerateDensity if |rho0| dips below rho_floor * max|rho0|.
CongruenceState init_wave(const CauchyData& cauchy, const SimConfig& cfg);

// Massive reduction: spatial trajectories plus the internal displacement.
//   rho0   = psidot0 / c^2
//   qdot_r = (d psi0 / da^r) / rho0      (lower index, raised with -1 signs)
//   taudot = (m / hbar) psi0 / rho0,  tau = 0
KgCongruenceState init_kg(const CauchyData& cauchy, const SimConfig& cfg);

// Acceleration of the massless material law,
//   qddot^i = (J / rho0) d/dq^j [ rho0 J^-1 (c^2 g^ij + qdot^i qdot^j) ],
// evaluated with periodic second-order stencils over the labels.
VectorField wave_acceleration(const CongruenceState& s, const MetricSignature& sig,
                              const PhysicalConstants& pc, double jacobian_floor);

struct KgAcceleration {
    VectorField qddot;
    ScalarField tauddot;
};

// Coupled accelerations of the massive reduction.  The extra-dimension label
// derivative is eliminated analytically: its cofactor column contributes the
// -kappa (dtau/da) corrections inside the force brackets and the explicit
// kappa-coupling terms outside them, with kappa = m c^2 / hbar.
//
// The tau regularity bound is checked before any deformation work so a
// diverging internal displacement surfaces as RegularWindowExceeded rather
// than as a downstream Jacobian failure.
KgAcceleration kg_acceleration(const KgCongruenceState& s, const PhysicalConstants& pc,
                               double jacobian_floor, double tau_bound);

// One classical RK4 step, fixed stage order, deterministic accumulation.
// Model failures thrown by the acceleration are annotated with the stage.
void rk4_step(CongruenceState& s, const MetricSignature& sig, const PhysicalConstants& pc,
              double jacobian_floor, double dt);
void rk4_step(KgCongruenceState& s, const PhysicalConstants& pc, double jacobian_floor,
              double tau_bound, double dt);

// Generic scalar-system RK4 step for small test problems: y'' = accel(y, y').
void rk4_step_scalar(double& y, double& ydot,
                     double (*accel)(double y, double ydot), double dt);

// Max-norm residual of the massless gradient condition in material form,
//   rho0 J^-1 g_jk qdot^j dq^k/da^i - dPhi/da^i,
// where phi is the amplitude pulled back to the labels, Phi(a,t) = Psi(q(a,t),t).
VectorField irrotationality_residual(const CongruenceState& s, const MetricSignature& sig,
                                     const ScalarField& phi, double jacobian_floor);

struct KgIrrotationality {
    VectorField spatial;  // rho0 J^-1 (c^2 taudot dtau/da^r - qdot^s dq^s/da^r) - dphi/da^r
    ScalarField clock;    // rho0 J^-1 taudot - (m/hbar) phi
};

// Massive material gradient conditions.  psi_at_q is the amplitude
// interpolated along the congruence; phi = psi_at_q * exp(kappa tau) is formed
// internally.
KgIrrotationality kg_irrotationality_residual(const KgCongruenceState& s,
                                              const ScalarField& psi_at_q,
                                              const PhysicalConstants& pc,
                                              double jacobian_floor);

// Interpolates a grid field along the congruence positions, one value per
// label: the material pullback Phi(a,t) = Psi(q(a,t), t).
ScalarField pullback(const ScalarField& grid_field, const VectorField& q);

} // namespace kgc
