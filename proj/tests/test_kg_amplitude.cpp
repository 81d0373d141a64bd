#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "kgc/deposit.hpp"
#include "kgc/dynamics.hpp"
#include "kgc/errors.hpp"
#include "kgc/interp.hpp"
#include "kgc/kg_amplitude.hpp"
#include "kgc/oracles.hpp"
#include "kgc/residuals.hpp"
#include "kgc/sim_config.hpp"

using namespace kgc;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

oracle::PlaneWave standard_wave(double phase = std::numbers::pi / 2.0) {
    oracle::PlaneWave pw;
    pw.k = {0.6};
    pw.amplitude = 1.0;
    pw.phase = phase;
    return pw;
}

// One wavelength of k = 0.6 sampled off the phase nodes.
Lattice standard_lattice(int n = 128) {
    const double box = two_pi / 0.6;
    return Lattice({n}, {box}, {0.5 * box / n});
}

SimConfig standard_config(const Lattice& lat, double dt) {
    SimConfig cfg;
    cfg.lattice = lat;
    cfg.signature = MetricSignature::spatial(lat.dim());
    cfg.constants = PhysicalConstants::natural();
    cfg.dt = dt;
    cfg.cfl = 0.25;
    return cfg.validate();
}

KgCongruenceState evolve(KgCongruenceState s, const SimConfig& cfg, int steps) {
    for (int k = 0; k < steps; ++k)
        rk4_step(s, cfg.constants, cfg.jacobian_floor, cfg.tau_bound(), cfg.dt);
    return s;
}

// Exact fixed-frame fields of a massive plane wave, for feeding the residual
// monitors without any deposit in the way.
KgSpatialFields exact_fields(const oracle::PlaneWave& pw, const Lattice& lat, double t) {
    const PhysicalConstants& pc = pw.constants;
    KgSpatialFields f;
    f.t = t;
    f.rho = ScalarField(lat);
    f.mom = VectorField(lat, lat.dim());
    f.mom4 = ScalarField(lat);
    f.v = VectorField(lat, lat.dim());
    f.v4 = ScalarField(lat);
    f.valid.assign(lat.size(), 1);
    for (std::size_t s = 0; s < lat.size(); ++s) {
        const auto x = lat.position(s);
        f.rho.v[s] = pw.psidot(x, t) / (pc.c * pc.c);
        f.mom.comp[0][s] = -pw.dpsi(0, x, t);    // upper index, all-minus metric
        f.mom4.v[s] = pc.mc_over_hbar() * pw.psi(x, t);
    }
    return f;
}

} // namespace

// --------------------------------------------------------------------- clock

TEST_CASE("internal clock starts at alpha exactly") {
    const Lattice lat = standard_lattice();
    const oracle::PlaneWave pw = standard_wave();
    const SimConfig cfg = standard_config(lat, 0.002);
    const KgCongruenceState s = init_kg(pw.sample_cauchy(lat), cfg);
    const InternalClock ic = internal_clock(s, cfg.constants);
    CHECK(ic.alpha == cfg.constants.alpha());
    for (std::size_t l = 0; l < lat.size(); ++l) {
        CHECK(ic.T.v[l] == cfg.constants.alpha());        // exp(-0) is exactly 1
        CHECK(ic.Tdot.v[l] == -s.taudot.v[l]);
    }
}

TEST_CASE("internal clock matches the closed-form modulus along the flow") {
    const Lattice lat = standard_lattice();
    const oracle::PlaneWave pw = standard_wave();
    const double t = 0.02;
    KgCongruenceState s;
    s.t = t;
    s.q = identity_positions(lat);
    s.qdot = VectorField(lat, 1);
    s.tau = ScalarField(lat);
    s.taudot = ScalarField(lat);
    s.rho0 = ScalarField(lat, 1.0);
    for (std::size_t l = 0; l < lat.size(); ++l) {
        const auto a = lat.position(l);
        s.tau.v[l] = pw.tau(a, t);
        s.taudot.v[l] = pw.taudot(a, t);
    }
    const InternalClock ic = internal_clock(s, pw.constants);
    for (std::size_t l = 0; l < lat.size(); ++l) {
        const auto a = lat.position(l);
        CHECK(ic.T.v[l] ==
              doctest::Approx(pw.clock_modulus(a, t)).epsilon(1e-12));
        CHECK(ic.Tdot.v[l] ==
              doctest::Approx(pw.clock_modulus_rate(a, t)).epsilon(1e-11));
    }
}

// ------------------------------------------------------------ reconstruction

TEST_CASE("both reconstruction routes reproduce the initial amplitude") {
    const Lattice lat = standard_lattice();
    const oracle::PlaneWave pw = standard_wave();
    const SimConfig cfg = standard_config(lat, 0.002);
    const CauchyData data = pw.sample_cauchy(lat);
    const KgCongruenceState s = init_kg(data, cfg);

    const ScalarField scattered = kg_reconstruct(s, data.psidot0, lat, cfg.kernel,
                                                 cfg.constants, cfg.tau_bound());
    const ScalarField direct =
        kg_reconstruct_direct(s, lat, cfg.constants, cfg.jacobian_floor, cfg.tau_bound());
    for (std::size_t l = 0; l < lat.size(); ++l) {
        CHECK(std::abs(scattered.v[l] - data.psi0.v[l]) < 1e-12);
        CHECK(std::abs(direct.v[l] - data.psi0.v[l]) < 1e-12);
    }
}

TEST_CASE("evolved reconstructions track the closed-form amplitude") {
    const Lattice lat = standard_lattice();
    const oracle::PlaneWave pw = standard_wave();
    const SimConfig cfg = standard_config(lat, 0.002);
    const CauchyData data = pw.sample_cauchy(lat);
    const KgCongruenceState s = evolve(init_kg(data, cfg), cfg, 5);    // t = 0.01

    const ScalarField scattered = kg_reconstruct(s, data.psidot0, lat, cfg.kernel,
                                                 cfg.constants, cfg.tau_bound());
    const ScalarField direct =
        kg_reconstruct_direct(s, lat, cfg.constants, cfg.jacobian_floor, cfg.tau_bound());
    const ScalarField ref =
        sample([&](std::span<const double> x) { return pw.psi(x, s.t); }, lat);
    double worst_scatter = 0.0, worst_direct = 0.0, routes = 0.0;
    for (std::size_t l = 0; l < lat.size(); ++l) {
        worst_scatter = std::max(worst_scatter, std::abs(scattered.v[l] - ref.v[l]));
        worst_direct = std::max(worst_direct, std::abs(direct.v[l] - ref.v[l]));
        routes = std::max(routes, std::abs(direct.v[l] - scattered.v[l]));
    }
    CHECK(worst_direct < 5e-2);
    CHECK(worst_scatter < 5e-2);
    CHECK(routes < 1e-1);
}

TEST_CASE("reconstruction refuses a collapsed clock") {
    const Lattice lat = standard_lattice(16);
    KgCongruenceState s;
    s.t = 0.2;
    s.q = identity_positions(lat);
    s.qdot = VectorField(lat, 1);
    s.tau = ScalarField(lat);
    s.taudot = ScalarField(lat);
    s.rho0 = ScalarField(lat, 1.0);
    s.tau.v[3] = 25.0;    // alpha = 1, default bound 20 alphas
    const ScalarField psidot0(lat, 1.0);
    CHECK_THROWS_AS(kg_reconstruct(s, psidot0, lat, DepositKernel::multilinear,
                                   PhysicalConstants::natural(), 20.0),
                    RegularWindowExceeded);
    CHECK_THROWS_AS(
        kg_reconstruct_direct(s, lat, PhysicalConstants::natural(), 1e-6, 20.0),
        RegularWindowExceeded);
}

// ------------------------------------------------------------------- complex

TEST_CASE("quadrature pair reconstructs a unit-modulus complex amplitude") {
    const Lattice lat = standard_lattice();
    const oracle::PlaneWave pw1 = standard_wave(std::numbers::pi / 2.0);
    const oracle::PlaneWave pw2 = standard_wave(std::numbers::pi);    // quadrature partner
    const SimConfig cfg = standard_config(lat, 0.002);
    const CauchyData d1 = pw1.sample_cauchy(lat);
    const CauchyData d2 = pw2.sample_cauchy(lat);

    const KgCongruenceState s1 = init_kg(d1, cfg);
    const KgCongruenceState s2 = init_kg(d2, cfg);
    {
        const auto [re, im] = complex_amplitude(s1, d1.psidot0, s2, d2.psidot0, lat,
                                                cfg.kernel, cfg.constants, cfg.tau_bound());
        for (std::size_t l = 0; l < lat.size(); ++l)
            CHECK(std::abs(std::hypot(re.v[l], im.v[l]) - 1.0) < 1e-12);
    }
    {
        const KgCongruenceState e1 = evolve(s1, cfg, 5);
        const KgCongruenceState e2 = evolve(s2, cfg, 5);
        const auto [re, im] = complex_amplitude(e1, d1.psidot0, e2, d2.psidot0, lat,
                                                cfg.kernel, cfg.constants, cfg.tau_bound());
        double worst = 0.0;
        for (std::size_t l = 0; l < lat.size(); ++l)
            worst = std::max(worst, std::abs(std::hypot(re.v[l], im.v[l]) - 1.0));
        CHECK(worst < 5e-3);
    }
}

// ----------------------------------------------------------------- residuals

TEST_CASE("five relations hold on exact fields and flag scaled momentum") {
    const Lattice lat = standard_lattice();
    const oracle::PlaneWave pw = standard_wave();
    const double t = 0.25;
    const KgSpatialFields f = exact_fields(pw, lat, t);
    const ScalarField psi =
        sample([&](std::span<const double> x) { return pw.psi(x, t); }, lat);
    const ScalarField psidot =
        sample([&](std::span<const double> x) { return pw.psidot(x, t); }, lat);

    CHECK(five_relations_residual(f, psi, psidot, pw.constants) < 1e-3);

    KgSpatialFields broken = f;
    for (double& v : broken.mom.comp[0]) v *= 1.1;
    CHECK(five_relations_residual(broken, psi, psidot, pw.constants) > 2e-2);
}

TEST_CASE("equation residual needs the mass term on massive frames") {
    const Lattice lat = standard_lattice();
    const oracle::PlaneWave pw = standard_wave();
    const double dt = 0.01;
    std::vector<ScalarField> frames;
    for (int f = 0; f < 3; ++f)
        frames.push_back(sample(
            [&](std::span<const double> x) { return pw.psi(x, dt * f); }, lat));
    const double kappa = pw.constants.mc_over_hbar();
    CHECK(wave_equation_residual(frames, dt, pw.constants.c, kappa) < 1e-3);
    CHECK(wave_equation_residual(frames, dt, pw.constants.c, 0.0) > 0.5);
}

TEST_CASE("material gradient conditions hold at initialization") {
    const Lattice lat = standard_lattice();
    const oracle::PlaneWave pw = standard_wave();
    const SimConfig cfg = standard_config(lat, 0.002);
    const CauchyData data = pw.sample_cauchy(lat);
    const KgCongruenceState s = init_kg(data, cfg);
    // at t = 0 the pullback of the amplitude is the initial amplitude itself
    const ScalarField psi_at_q = pullback(data.psi0, s.q);
    const KgIrrotationality r =
        kg_irrotationality_residual(s, psi_at_q, cfg.constants, cfg.jacobian_floor);
    double worst_clock = 0.0, worst_spatial = 0.0;
    for (std::size_t l = 0; l < lat.size(); ++l) {
        worst_clock = std::max(worst_clock, std::abs(r.clock.v[l]));
        worst_spatial = std::max(worst_spatial, std::abs(r.spatial.comp[0][l]));
    }
    // clock channel: rho0 taudot is (m/hbar) psi0 by construction
    CHECK(worst_clock < 1e-13);
    CHECK(worst_spatial < 5e-2);
}

// ------------------------------------------------------------------- deposit

TEST_CASE("massive deposit carries the attenuated charge and clock rate") {
    const Lattice lat = standard_lattice();
    const oracle::PlaneWave pw = standard_wave();
    const SimConfig cfg = standard_config(lat, 0.002);
    const KgCongruenceState s = init_kg(pw.sample_cauchy(lat), cfg);
    const KgSpatialFields f = kg_deposit(s, cfg.constants, lat, cfg.kernel, cfg.rho_floor);
    CHECK(f.t == 0.0);
    for (std::size_t l = 0; l < lat.size(); ++l) {
        // tau = 0: no attenuation, labels node-aligned
        CHECK(f.rho.v[l] == doctest::Approx(s.rho0.v[l]).epsilon(1e-12));
        if (f.valid[l])
            CHECK(f.v4.v[l] ==
                  doctest::Approx(cfg.constants.c * s.taudot.v[l]).epsilon(1e-10));
    }
}
