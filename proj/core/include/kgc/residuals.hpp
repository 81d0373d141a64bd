#pragma once

#include <vector>

#include "kgc/constants.hpp"
#include "kgc/deposit.hpp"
#include "kgc/metric.hpp"

namespace kgc {

// Fixed-frame conservation-law residuals evaluated on deposited field
// histories.  Histories must be uniformly spaced in time; time derivatives
// are central, so each residual is reported over interior frames only.
// These are diagnostics: large values flag a broken run, they never alter it.

// max |d rho/dt + div mom| over interior frames.
double continuity_residual(const std::vector<SpatialFields>& history);

// Massive variant; the reduction adds the internal-channel drain term:
// max |d rho/dt + div mom + (m c / hbar) mom4|.
double kg_continuity_residual(const std::vector<KgSpatialFields>& history,
                              const PhysicalConstants& pc);

// max |d mom^i/dt - c^2 g^{ij} d_j rho| over interior frames.
double euler_residual(const std::vector<SpatialFields>& history, const MetricSignature& sig,
                      double c);

// max over axis pairs of |d_i (mom_j) - d_j (mom_i)| with lowered momentum
// components; the gradient-field condition.  NotApplicable in one dimension.
double gradient_condition_residual(const SpatialFields& fields, const MetricSignature& sig);

// max |(1/c^2) psi_tt - lap(psi) + kappa^2 psi| over interior frames of a
// uniformly spaced amplitude history; kappa = 0 gives the massless equation.
double wave_equation_residual(const std::vector<ScalarField>& frames, double dt, double c,
                              double kappa);

// max over the five fixed-frame gradient relations of the massive reduction,
// evaluated against a matching amplitude pair (psi, psidot) on the same grid:
//   rho c = psidot / c,   -mom^r = d_r psi,   mom4 = (m c / hbar) psi.
double five_relations_residual(const KgSpatialFields& fields, const ScalarField& psi,
                               const ScalarField& psidot, const PhysicalConstants& pc);

} // namespace kgc
