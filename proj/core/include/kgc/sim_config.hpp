#pragma once

#include <string>

#include "kgc/constants.hpp"
#include "kgc/lattice.hpp"
#include "kgc/metric.hpp"

namespace kgc {

enum class DepositKernel { nearest, multilinear };

// Everything a run needs beyond the Cauchy data itself.  Constructing a
// SimConfig validates the cross-field constraints once, so downstream code
// can assume a coherent parameter set.
struct SimConfig {
    Lattice lattice;              // label lattice; deposits reuse its shape
    MetricSignature signature;    // spatial block signature
    PhysicalConstants constants;

    double dt = 0.0;
    double cfl = 0.5;             // advection bound factor, must be <= 0.5
    int snapshot_every = 1;

    DepositKernel kernel = DepositKernel::multilinear;

    double rho_floor = 1e-3;        // relative |rho0| floor (degeneracy guard)
    double jacobian_floor = 1e-6;   // J at or below this raises JacobianCollapse
    double velocity_floor = 1e-6;   // relative |psi_dot| floor on first-order paths
    double tau_max_alphas = 20.0;   // regular window bound: |tau| <= this * alpha
    double window = 0.4;            // fraction of the estimated first singular time

    // Validates and returns *this so call sites can build-and-check in one
    // expression.  Throws CFLViolation or ConfigError on bad parameter sets.
    SimConfig& validate();

    double cfl_bound() const { return cfl * lattice.min_spacing() / constants.c; }
    double tau_bound() const { return tau_max_alphas * constants.alpha(); }
};

} // namespace kgc
