#pragma once

#include <cstdint>
#include <vector>

#include "kgc/congruence.hpp"
#include "kgc/constants.hpp"
#include "kgc/sim_config.hpp"

namespace kgc {

// Fixed-frame fields produced by conservative particle-to-grid deposition.
// `rho` and `mom` are the deposited densities (total charge is conserved
// exactly by the kernel partition of unity); `v` is momentum over density,
// defined only where `valid` is set (deposited |rho| above the relative
// floor) and zero elsewhere.
struct SpatialFields {
    double t = 0.0;
    ScalarField rho;
    VectorField mom;
    VectorField v;
    std::vector<std::uint8_t> valid;
};

// The massive reduction adds the internal-rate channel: mom4 = rho * v4 with
// v4 = c * taudot, and the deposited charge carries the clock attenuation
// factor exp(-tau / alpha).
struct KgSpatialFields {
    double t = 0.0;
    ScalarField rho;
    VectorField mom;
    ScalarField mom4;
    VectorField v;
    ScalarField v4;
    std::vector<std::uint8_t> valid;
};

// Conservative scatter of per-label charges onto a periodic grid: every label
// adds charge * weight / cell_volume at the kernel's support nodes, so the
// box integral of the result equals the summed charge exactly.  Serial in
// label order, hence bit-stable regardless of threading anywhere else.
void scatter(const Lattice& grid, DepositKernel kernel, const VectorField& positions,
             const std::vector<double>& charges, std::vector<double>& accum);

SpatialFields deposit(const CongruenceState& s, const Lattice& grid, DepositKernel kernel,
                      double rho_floor);

KgSpatialFields kg_deposit(const KgCongruenceState& s, const PhysicalConstants& pc,
                           const Lattice& grid, DepositKernel kernel, double rho_floor);

// Box integral of a gridded density (sum times cell volume).
double total_charge(const ScalarField& rho);

} // namespace kgc
