#pragma once

#include <functional>
#include <vector>

#include "kgc/congruence.hpp"
#include "kgc/constants.hpp"

namespace kgc {

// A gridded amplitude history at uniform cadence, the input to the
// first-order trajectory construction.  Frames run from t[0]; psi and psidot
// share the grid.
struct AmplitudeHistory {
    std::vector<double> t;
    std::vector<ScalarField> psi;
    std::vector<ScalarField> psidot;

    double dt() const;
    void validate() const;
};

// Called after every accepted step (and once at step 0) with the current
// positions and internal displacements.
using PathObserver =
    std::function<void(int step, double t, const VectorField& q, const ScalarField& tau)>;

// Integrates the first-order guidance law through a given amplitude history:
//   dq^r/dt = -c^2 (d_r psi) / psidot,   d tau/dt = (m c^2 / hbar) psi / psidot,
// with spatial gradients formed by central differences on each frame,
// multilinear interpolation in space and linear interpolation in time.  RK4
// in time, one path per label site, tau(0) = 0.
//
// Throws VelocitySingularity when |psidot| falls below
// velocity_floor * max|psidot(frame 0)| along a path, and InsufficientHistory
// when a stage time leaves the stored history.
KgCongruenceState trajectories_from_amplitude(const AmplitudeHistory& hist,
                                              const Lattice& labels,
                                              const PhysicalConstants& pc, double dt, int steps,
                                              double velocity_floor,
                                              const PathObserver& observer = {});

} // namespace kgc
