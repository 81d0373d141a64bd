#include "kgc/kg_amplitude.hpp"

#include <array>
#include <cmath>

#include "kgc/deformation.hpp"
#include "kgc/errors.hpp"
#include "kgc/interp.hpp"
#include "kgc/reconstruct.hpp"

namespace kgc {

namespace {

void check_regular(const KgCongruenceState& s, double tau_bound) {
    for (std::size_t l = 0; l < s.tau.size(); ++l)
        if (!(std::abs(s.tau.v[l]) <= tau_bound))
            throw RegularWindowExceeded(l, s.t, s.tau.v[l]);
}

} // namespace

InternalClock internal_clock(const KgCongruenceState& s, const PhysicalConstants& pc) {
    const double alpha = pc.alpha();
    InternalClock clock;
    clock.alpha = alpha;
    clock.T = ScalarField(s.lattice());
    clock.Tdot = ScalarField(s.lattice());
    for (std::size_t l = 0; l < s.tau.size(); ++l) {
        const double decay = std::exp(-s.tau.v[l] / alpha);
        clock.T.v[l] = alpha * decay;
        clock.Tdot.v[l] = -s.taudot.v[l] * decay;
    }
    return clock;
}

ScalarField kg_reconstruct(const KgCongruenceState& s, const ScalarField& psidot0,
                           const Lattice& grid, DepositKernel kernel,
                           const PhysicalConstants& pc, double tau_bound) {
    if (psidot0.lat != s.lattice())
        throw ConfigError("initial amplitude rate is not on the label lattice");
    if (grid.dim() != s.dim())
        throw ConfigError("reconstruction grid dimension does not match the state");
    check_regular(s, tau_bound);

    const double alpha = pc.alpha();
    const double dvol = s.lattice().cell_volume();
    std::vector<double> charge(s.lattice().size());
    for (std::size_t l = 0; l < charge.size(); ++l) {
        const double tdot = -s.taudot.v[l] * std::exp(-s.tau.v[l] / alpha);
        charge[l] = -alpha * tdot * psidot0.v[l] * dvol;
    }
    ScalarField psi(grid);
    std::vector<double> accum;
    scatter(grid, kernel, s.q, charge, accum);
    psi.v = std::move(accum);
    return psi;
}

ScalarField kg_reconstruct_direct(const KgCongruenceState& s, const Lattice& grid,
                                  const PhysicalConstants& pc, double jacobian_floor,
                                  double tau_bound) {
    if (grid.dim() != s.dim())
        throw ConfigError("reconstruction grid dimension does not match the state");
    check_regular(s, tau_bound);

    const Lattice& labels = s.lattice();
    const double kappa = pc.kappa();
    const double hbar_over_m = pc.hbar / pc.mass;

    const DeformationData def = deformation(s, jacobian_floor);
    ScalarField source(labels);
    for (std::size_t l = 0; l < labels.size(); ++l)
        source.v[l] = hbar_over_m * s.rho0.v[l] * std::exp(-kappa * s.tau.v[l]) *
                      s.taudot.v[l] / def.J[l];

    const InverseMap inv(s.q);
    ScalarField psi(grid);
    std::array<double, Lattice::max_dim> x{};
    std::array<double, Lattice::max_dim> a{};
    const std::span<double> xs(x.data(), static_cast<std::size_t>(grid.dim()));
    const std::span<double> as(a.data(), static_cast<std::size_t>(labels.dim()));
    for (std::size_t node = 0; node < grid.size(); ++node) {
        grid.position(node, xs);
        inv.preimage(xs, as);
        psi.v[node] = interpolate(source, as);
    }
    return psi;
}

std::pair<ScalarField, ScalarField> complex_amplitude(
    const KgCongruenceState& s1, const ScalarField& psidot10, const KgCongruenceState& s2,
    const ScalarField& psidot20, const Lattice& grid, DepositKernel kernel,
    const PhysicalConstants& pc, double tau_bound) {
    ScalarField re(grid), im(grid);
    try {
        re = kg_reconstruct(s1, psidot10, grid, kernel, pc, tau_bound);
    } catch (Error& e) {
        e.annotate("real-part congruence");
        throw;
    }
    try {
        im = kg_reconstruct(s2, psidot20, grid, kernel, pc, tau_bound);
    } catch (Error& e) {
        e.annotate("imaginary-part congruence");
        throw;
    }
    return {std::move(re), std::move(im)};
}

} // namespace kgc
