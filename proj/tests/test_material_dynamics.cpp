#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <span>
#include <string>

#include "kgc/congruence.hpp"
#include "kgc/deformation.hpp"
#include "kgc/dynamics.hpp"
#include "kgc/errors.hpp"
#include "kgc/interp.hpp"
#include "kgc/oracles.hpp"
#include "kgc/sim_config.hpp"

using namespace kgc;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

SimConfig base_config(const Lattice& lat) {
    SimConfig cfg;
    cfg.lattice = lat;
    cfg.signature = MetricSignature::spatial(lat.dim());
    cfg.constants = PhysicalConstants::natural();
    cfg.dt = 1e-3;
    cfg.cfl = 0.25;
    return cfg.validate();
}

// A massive plane-wave congruence state assembled from the closed-form flow
// (identity positions at t = 0, rigid velocity, zero internal displacement).
KgCongruenceState closed_form_kg_state(const oracle::PlaneWave& pw, const Lattice& lat) {
    KgCongruenceState s;
    s.t = 0.0;
    s.q = identity_positions(lat);
    s.qdot = VectorField(lat, lat.dim());
    s.tau = ScalarField(lat);
    s.taudot = ScalarField(lat);
    s.rho0 = ScalarField(lat);
    const double c2 = pw.constants.c * pw.constants.c;
    for (std::size_t l = 0; l < lat.size(); ++l) {
        const auto a = lat.position(l);
        for (int r = 0; r < lat.dim(); ++r)
            s.qdot.comp[static_cast<std::size_t>(r)][l] = pw.velocity(r);
        s.taudot.v[l] = pw.taudot(a, 0.0);
        s.rho0.v[l] = pw.psidot(a, 0.0) / c2;
    }
    return s;
}

} // namespace

// ------------------------------------------------------------- deformation

TEST_CASE("identity congruence has unit deformation exactly") {
    Lattice lat({8, 6}, {2.0, 3.0});
    const VectorField q = identity_positions(lat);
    const DeformationData def = deformation(q, 0.0, 1e-6);
    for (std::size_t s = 0; s < lat.size(); ++s) {
        CHECK(def.J[s] == 1.0);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK(def.d(s, i, j) == (i == j ? 1.0 : 0.0));
    }
}

TEST_CASE("adjugate inverts the deformation at every site of a sheared map") {
    Lattice lat({24, 24}, {two_pi, two_pi});
    VectorField q = identity_positions(lat);
    for (std::size_t s = 0; s < lat.size(); ++s) {
        const auto a = lat.position(s);
        q.comp[0][s] = a[0] + 0.3 * std::sin(a[1]);
    }
    const DeformationData def = deformation(q, 0.0, 1e-6);
    for (std::size_t s = 0; s < lat.size(); ++s) {
        // triangular block: the determinant is the product of the diagonal
        CHECK(def.J[s] == doctest::Approx(1.0).epsilon(1e-14));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                double prod = 0.0;
                for (int k = 0; k < 2; ++k) prod += def.d(s, i, k) * def.a(s, k, j);
                const double want = (i == j) ? def.J[s] : 0.0;
                CHECK(std::abs(prod - want) < 1e-13);
            }
    }
}

TEST_CASE("deformation ignores a uniform drift of the whole congruence") {
    // The operator differences the periodic displacement q - a, so moving
    // every trajectory by the same constant (even across the box seam)
    // changes nothing, bit for bit.
    Lattice lat({16}, {two_pi});
    VectorField q = identity_positions(lat);
    for (std::size_t s = 0; s < lat.size(); ++s)
        q.comp[0][s] += 0.05 * std::sin(lat.position(s)[0]);
    const DeformationData base = deformation(q, 0.0, 1e-6);
    VectorField shifted = q;
    for (std::size_t s = 0; s < lat.size(); ++s) shifted.comp[0][s] += 7.7;
    const DeformationData moved = deformation(shifted, 0.0, 1e-6);
    for (std::size_t s = 0; s < lat.size(); ++s) {
        CHECK(moved.J[s] == base.J[s]);
        CHECK(moved.d(s, 0, 0) == base.d(s, 0, 0));
    }
}

TEST_CASE("crossed trajectories raise a collapse naming site and time") {
    Lattice lat({8}, {two_pi});
    VectorField q = identity_positions(lat);
    // fold two neighbors through each other
    const double da = lat.spacing(0);
    q.comp[0][2] += 0.8 * da;
    q.comp[0][3] -= 0.8 * da;
    CHECK_THROWS_AS(deformation(q, 1.25, 1e-6), JacobianCollapse);
    try {
        deformation(q, 1.25, 1e-6);
    } catch (const JacobianCollapse& e) {
        CHECK(e.time == 1.25);
        CHECK(e.site < lat.size());
        CHECK(e.jacobian <= 1e-6);
    }
}

TEST_CASE("material spatial derivative reduces to the label derivative when q = a") {
    Lattice lat({64}, {two_pi});
    const ScalarField f =
        sample([](std::span<const double> x) { return std::cos(x[0]); }, lat);
    const DeformationData def = deformation(identity_positions(lat), 0.0, 1e-6);
    const VectorField g = material_spatial_derivative(f, def);
    for (std::size_t s = 0; s < lat.size(); ++s) {
        const double x = lat.position(s)[0];
        CHECK(std::abs(g.comp[0][s] + std::sin(x)) < 2e-3);
    }
}

// ----------------------------------------------------------- initialization

TEST_CASE("massless init reproduces the rigid plane-wave flow") {
    oracle::PlaneWave pw;
    pw.k = {1.0};
    pw.massive = false;
    pw.phase = std::numbers::pi / 2.0;
    Lattice lat({64}, {two_pi}, {std::numbers::pi / 64.0});
    const CauchyData data = pw.sample_cauchy(lat);
    const CongruenceState s = init_wave(data, base_config(lat));
    // For the travelling solution the discrete derivative of the amplitude
    // and the sampled density share the same cosine factor, so the velocity
    // error collapses to the uniform 1 - sinc(spacing) stencil factor.
    double worst = 0.0;
    for (std::size_t l = 0; l < lat.size(); ++l)
        worst = std::max(worst, std::abs(s.qdot.comp[0][l] - pw.velocity(0)));
    CHECK(worst < 5e-3);
    CHECK(pw.velocity(0) == doctest::Approx(1.0));  // massless labels ride at c
}

TEST_CASE("near-zero initial density is rejected with the failing site") {
    Lattice lat({32}, {two_pi});
    CauchyData data;
    data.psi0 = ScalarField(lat);
    data.psidot0 =
        sample([](std::span<const double> x) { return std::sin(x[0]); }, lat);
    // sin vanishes exactly at the first site
    SimConfig cfg = base_config(lat);
    CHECK_THROWS_AS(init_wave(data, cfg), DegenerateDensity);
    try {
        init_wave(data, cfg);
    } catch (const DegenerateDensity& e) {
        CHECK(e.site < lat.size());
        CHECK(std::abs(e.value) < 1e-12);
    }
}

// -------------------------------------------------------------- acceleration

TEST_CASE("uniformly drifting constant-density congruence feels no force") {
    Lattice lat({16, 8}, {2.0, 2.0});
    CongruenceState s;
    s.t = 0.0;
    s.q = identity_positions(lat);
    s.qdot = VectorField(lat, 2);
    s.rho0 = ScalarField(lat, 0.7);
    for (std::size_t l = 0; l < lat.size(); ++l) {
        s.qdot.comp[0][l] = 0.3;
        s.qdot.comp[1][l] = -0.1;
    }
    const VectorField acc =
        wave_acceleration(s, MetricSignature::spatial(2), PhysicalConstants::natural(), 1e-6);
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t l = 0; l < lat.size(); ++l) CHECK(acc.comp[c][l] == 0.0);
}

TEST_CASE("massive plane-wave state accelerates only its internal channel") {
    oracle::PlaneWave pw;
    pw.k = {0.6};
    pw.phase = std::numbers::pi / 2.0;
    const double box = two_pi / 0.6;
    Lattice lat({128}, {box}, {0.5 * box / 128});
    const KgCongruenceState s = closed_form_kg_state(pw, lat);
    const KgAcceleration acc = kg_acceleration(s, pw.constants, 1e-6, 20.0);

    // closed form: qddot = 0 and tauddot = csc^2(theta0) / (alpha^3 omega^2).
    const double alpha = pw.constants.alpha();
    const double omega = pw.omega();
    double worst_q = 0.0, worst_tau = 0.0;
    for (std::size_t l = 0; l < lat.size(); ++l) {
        const auto a = lat.position(l);
        const double s0 = std::sin(pw.theta(a, 0.0));
        const double cot = std::cos(pw.theta(a, 0.0)) / s0;
        if (std::abs(cot) > 2.0) continue;  // keep clear of clock singularities
        const double tauddot_ref = 1.0 / (s0 * s0 * alpha * alpha * alpha * omega * omega);
        worst_q = std::max(worst_q, std::abs(acc.qddot.comp[0][l]));
        worst_tau = std::max(worst_tau, std::abs(acc.tauddot.v[l] - tauddot_ref));
    }
    CHECK(worst_q < 2e-2);
    CHECK(worst_tau < 2e-2);
}

TEST_CASE("internal displacement outside the window stops the run") {
    Lattice lat({8}, {two_pi});
    KgCongruenceState s;
    s.t = 0.5;
    s.q = identity_positions(lat);
    s.qdot = VectorField(lat, 1);
    s.tau = ScalarField(lat);
    s.taudot = ScalarField(lat);
    s.rho0 = ScalarField(lat, 1.0);
    s.tau.v[5] = 30.0;  // alpha = 1, bound 20 alphas
    CHECK_THROWS_AS(kg_acceleration(s, PhysicalConstants::natural(), 1e-6, 20.0),
                    RegularWindowExceeded);
    try {
        kg_acceleration(s, PhysicalConstants::natural(), 1e-6, 20.0);
    } catch (const RegularWindowExceeded& e) {
        CHECK(e.site == 5u);
        CHECK(e.time == 0.5);
        CHECK(e.tau == 30.0);
    }
}

// --------------------------------------------------------------------- rk4

TEST_CASE("scalar rk4 step matches the frozen oscillator value") {
    double y = 1.0, v = 0.0;
    rk4_step_scalar(y, v, [](double yy, double) { return -yy; }, 0.1);
    CHECK(std::abs(y - 0.9950041666666667) < 1e-15);
    CHECK(std::abs(std::cos(0.1) - 0.9950041652780258) < 1e-15);  // truth nearby
}

TEST_CASE("one massive rk4 step tracks the closed-form flow") {
    oracle::PlaneWave pw;
    pw.k = {0.6};
    pw.phase = std::numbers::pi / 2.0;
    const double box = two_pi / 0.6;
    Lattice lat({128}, {box}, {0.5 * box / 128});
    KgCongruenceState s = closed_form_kg_state(pw, lat);
    const double dt = 0.01;
    rk4_step(s, pw.constants, 1e-6, 20.0, dt);
    CHECK(s.t == dt);

    double worst_q = 0.0, worst_tau = 0.0;
    for (std::size_t l = 0; l < lat.size(); ++l) {
        const auto a = lat.position(l);
        const double cot = std::cos(pw.theta(a, 0.0)) / std::sin(pw.theta(a, 0.0));
        if (std::abs(cot) > 2.0) continue;
        worst_q = std::max(worst_q,
                           std::abs(s.q.comp[0][l] - (a[0] + pw.velocity(0) * dt)));
        worst_tau = std::max(worst_tau, std::abs(s.tau.v[l] - pw.tau(a, dt)));
    }
    CHECK(worst_q < 1e-5);
    CHECK(worst_tau < 1e-5);
}

TEST_CASE("time step above the advection bound is refused up front") {
    Lattice lat({64}, {1.0});
    SimConfig cfg;
    cfg.lattice = lat;
    cfg.signature = MetricSignature::spatial(1);
    cfg.constants = PhysicalConstants::natural();
    cfg.cfl = 0.25;
    cfg.dt = 1.0;  // a grid crossing takes 1/64
    CHECK_THROWS_AS(cfg.validate(), CFLViolation);
    try {
        cfg.validate();
    } catch (const CFLViolation& e) {
        CHECK(e.dt == 1.0);
        CHECK(e.bound == doctest::Approx(0.25 / 64.0));
        CHECK(std::string(e.what()).find("bound") != std::string::npos);
    }
}

TEST_CASE("focusing data collapses in finite time with a located failure") {
    // velocity profile that funnels neighboring labels together
    Lattice lat({32}, {two_pi});
    CauchyData data;
    data.psi0 =
        sample([](std::span<const double> x) { return 0.8 * std::sin(x[0]); }, lat);
    data.psidot0 =
        sample([](std::span<const double> x) { return 1.0 - 0.6 * std::cos(x[0]); }, lat);
    SimConfig cfg = base_config(lat);
    cfg.dt = 0.01;
    CongruenceState s = init_wave(data, cfg);
    bool collapsed = false;
    try {
        for (int k = 0; k < 400; ++k)
            rk4_step(s, cfg.signature, cfg.constants, cfg.jacobian_floor, cfg.dt);
    } catch (const JacobianCollapse& e) {
        collapsed = true;
        CHECK(e.site < lat.size());
        CHECK(e.time > 0.0);
        CHECK(e.time < 4.1);
    }
    CHECK(collapsed);
    // the state that was being advanced never went non-finite
    for (std::size_t l = 0; l < lat.size(); ++l) {
        CHECK(std::isfinite(s.q.comp[0][l]));
        CHECK(std::isfinite(s.qdot.comp[0][l]));
    }
}

// --------------------------------------------------------------- pullbacks

TEST_CASE("pullback composes field and flow") {
    Lattice lat({64}, {two_pi});
    const ScalarField f =
        sample([](std::span<const double> x) { return std::sin(x[0]); }, lat);
    VectorField q = identity_positions(lat);
    for (std::size_t l = 0; l < lat.size(); ++l) q.comp[0][l] += 0.2;
    const ScalarField phi = pullback(f, q);
    for (std::size_t l = 0; l < lat.size(); ++l) {
        const double x = lat.position(l)[0];
        CHECK(std::abs(phi.v[l] - std::sin(x + 0.2)) < 5e-3);
    }
}
