#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "kgc/errors.hpp"
#include "kgc/interp.hpp"
#include "kgc/oracles.hpp"
#include "kgc/run.hpp"

using namespace kgc;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

oracle::PlaneWave massive_wave() {
    oracle::PlaneWave pw;
    pw.k = {0.6};
    pw.amplitude = 1.0;
    pw.phase = std::numbers::pi / 2.0;
    return pw;
}

oracle::DAlembert rate_cosine(double base, double eps) {
    oracle::DAlembert d;
    d.c = 1.0;
    d.F = [=](double s) { return -0.5 * base * s - 0.5 * eps * std::sin(s); };
    d.G = [=](double s) { return 0.5 * base * s + 0.5 * eps * std::sin(s); };
    d.Fp = [=](double s) { return -0.5 * base - 0.5 * eps * std::cos(s); };
    d.Gp = [=](double s) { return 0.5 * base + 0.5 * eps * std::cos(s); };
    return d;
}

} // namespace

// ---------------------------------------------------------------- plane wave

TEST_CASE("massive dispersion and flow speed match frozen references") {
    const oracle::PlaneWave pw = massive_wave();
    CHECK(pw.omega() == doctest::Approx(1.16619037896906).epsilon(1e-15));
    CHECK(pw.velocity(0) == doctest::Approx(0.5144957554275266).epsilon(1e-15));
    CHECK(pw.clock_period() == doctest::Approx(7.327390254512591).epsilon(1e-15));
}

TEST_CASE("massless branch propagates at c and rejects the zero mode") {
    oracle::PlaneWave pw;
    pw.k = {0.5};
    pw.massive = false;
    CHECK(pw.omega() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(pw.velocity(0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(pw.label_phase(std::vector<double>{0.1}, 0.0), NotApplicable);
    CHECK_THROWS_AS(pw.clock_period(), NotApplicable);

    oracle::PlaneWave zero;
    zero.k = {0.0};
    zero.massive = false;
    CHECK_THROWS_AS(zero.omega(), DispersionViolation);
}

TEST_CASE("amplitude derivatives agree with finite differences") {
    const oracle::PlaneWave pw = massive_wave();
    const double h = 1e-6;
    const std::vector<double> x = {1.3};
    const double t = 0.7;
    const double fd_t =
        (pw.psi(x, t + h) - pw.psi(x, t - h)) / (2.0 * h);
    CHECK(std::abs(pw.psidot(x, t) - fd_t) < 1e-8);
    const std::vector<double> xp = {1.3 + h}, xm = {1.3 - h};
    const double fd_x = (pw.psi(xp, t) - pw.psi(xm, t)) / (2.0 * h);
    CHECK(std::abs(pw.dpsi(0, x, t) - fd_x) < 1e-8);
}

TEST_CASE("trajectories translate rigidly and carry the phase with them") {
    const oracle::PlaneWave pw = massive_wave();
    const std::vector<double> a = {2.1};
    const double t = 1.7;
    const auto q = pw.position(a, t);
    CHECK(q[0] == doctest::Approx(2.1 + pw.velocity(0) * t).epsilon(1e-15));
    CHECK(pw.label_phase(a, t) == doctest::Approx(pw.theta(q, t)).epsilon(1e-12));
}

TEST_CASE("internal displacement and clock match frozen references") {
    const oracle::PlaneWave pw = massive_wave();
    const std::vector<double> a = {1.0};
    CHECK(pw.tau(a, 0.0) == 0.0);
    CHECK(pw.tau(a, 0.3) == doctest::Approx(-0.1320381845290726).epsilon(1e-14));
    CHECK(pw.clock_modulus(a, 0.3) ==
          doctest::Approx(1.141151892782939).epsilon(1e-14));
    CHECK(pw.taudot(a, 0.3) == doctest::Approx(-0.305984686982483).epsilon(1e-13));
    CHECK(pw.regular_time(a) == doctest::Approx(1.1321333362467116).epsilon(1e-14));
}

TEST_CASE("displacement rate is the time derivative of the displacement") {
    const oracle::PlaneWave pw = massive_wave();
    const std::vector<double> a = {0.4};
    const double t = 0.5, h = 1e-6;
    const double fd = (pw.tau(a, t + h) - pw.tau(a, t - h)) / (2.0 * h);
    CHECK(std::abs(pw.taudot(a, t) - fd) < 1e-7);
    const double fdT =
        (pw.clock_modulus(a, t + h) - pw.clock_modulus(a, t - h)) / (2.0 * h);
    CHECK(std::abs(pw.clock_modulus_rate(a, t) - fdT) < 1e-7);
}

TEST_CASE("labels on a rate node have no regular window at all") {
    oracle::PlaneWave pw = massive_wave();
    pw.phase = 0.0;    // theta(0, 0) = 0 exactly
    const std::vector<double> a = {0.0};
    CHECK_THROWS_AS(pw.tau(a, 0.1), SingularLabel);
    CHECK_THROWS_AS(pw.clock_modulus(a, 0.1), SingularLabel);
    CHECK(pw.regular_time(a) == 0.0);
}

TEST_CASE("sampled cauchy data reproduces the closed form bit for bit") {
    const oracle::PlaneWave pw = massive_wave();
    const double box = two_pi / 0.6;
    const Lattice lat({64}, {box}, {0.5 * box / 64});
    const CauchyData data = pw.sample_cauchy(lat);
    for (std::size_t s = 0; s < lat.size(); ++s) {
        const auto x = lat.position(s);
        CHECK(data.psi0.v[s] == pw.psi(x, 0.0));
        CHECK(data.psidot0.v[s] == pw.psidot(x, 0.0));
    }
    const Lattice wrong({8, 8}, {1.0, 1.0}, {0.0, 0.0});
    CHECK_THROWS_AS(pw.sample_cauchy(wrong), ConfigError);
}

// ----------------------------------------------------------------- d'Alembert

TEST_CASE("counter-propagating split solves the one-dimensional equation") {
    const oracle::DAlembert d = rate_cosine(1.0, 0.1);
    // psi = base t + eps cos x sin t, frozen at (x, t) = (0.7, 1)
    CHECK(d.psi(0.7, 1.0) == doctest::Approx(1.0643592508556905).epsilon(1e-14));
    const double h = 1e-6;
    for (const double x : {0.0, 0.7, 2.9}) {
        for (const double t : {0.2, 1.0}) {
            CHECK(std::abs(d.psidot(x, t) - (d.psi(x, t + h) - d.psi(x, t - h)) / (2 * h)) <
                  1e-8);
            CHECK(std::abs(d.dpsi(x, t) - (d.psi(x + h, t) - d.psi(x - h, t)) / (2 * h)) <
                  1e-8);
            // closed form it decomposes: base t + eps cos x sin t
            CHECK(d.psi(x, t) ==
                  doctest::Approx(t + 0.1 * std::cos(x) * std::sin(t)).epsilon(1e-14));
        }
    }
}

// ------------------------------------------------------------------ leapfrog

TEST_CASE("fixed-frame scheme tracks a massless travelling wave") {
    oracle::PlaneWave pw;
    pw.k = {1.0};
    pw.phase = 0.3;
    pw.massive = false;
    const Lattice lat({256}, {two_pi}, {0.0});
    const CauchyData data = pw.sample_cauchy(lat);
    const double dt = 0.01;
    const int steps = 100;
    const oracle::LeapfrogResult r = oracle::leapfrog_evolve(data, 1.0, 0.0, dt, steps);
    CHECK(r.t == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.steps == steps);
    double worst = 0.0;
    for (std::size_t s = 0; s < lat.size(); ++s) {
        const auto x = lat.position(s);
        worst = std::max(worst, std::abs(r.psi.v[s] - pw.psi(x, r.t)));
    }
    CHECK(worst < 1e-3);
}

TEST_CASE("fixed-frame scheme tracks a massive standing phase") {
    const oracle::PlaneWave pw = massive_wave();
    const double box = two_pi / 0.6;
    const Lattice lat({256}, {box}, {0.0});
    const CauchyData data = pw.sample_cauchy(lat);
    const double dt = 0.02;
    const int steps = 50;
    const double kappa = pw.constants.mc_over_hbar();
    const oracle::LeapfrogResult r =
        oracle::leapfrog_evolve(data, pw.constants.c, kappa, dt, steps);
    double worst = 0.0, worst_dot = 0.0;
    for (std::size_t s = 0; s < lat.size(); ++s) {
        const auto x = lat.position(s);
        worst = std::max(worst, std::abs(r.psi.v[s] - pw.psi(x, r.t)));
        worst_dot = std::max(worst_dot, std::abs(r.psidot.v[s] - pw.psidot(x, r.t)));
    }
    CHECK(worst < 1e-3);
    CHECK(worst_dot < 2e-3);
}

TEST_CASE("fixed-frame energy is conserved to scheme order") {
    const oracle::PlaneWave pw = massive_wave();
    const double box = two_pi / 0.6;
    const Lattice lat({128}, {box}, {0.0});
    const CauchyData data = pw.sample_cauchy(lat);
    const MetricSignature sig = MetricSignature::spatial(1);
    const double kappa = pw.constants.mc_over_hbar();
    const double e0 = oracle::field_energy(data.psi0, data.psidot0, sig, 1.0, kappa);
    CHECK(e0 > 0.0);
    const oracle::LeapfrogResult r = oracle::leapfrog_evolve(data, 1.0, kappa, 0.02, 200);
    const double e1 = oracle::field_energy(r.psi, r.psidot, sig, 1.0, kappa);
    CHECK(std::abs(e1 - e0) / e0 < 1e-3);
}

TEST_CASE("frame callback fires on schedule with centered rates") {
    const oracle::PlaneWave pw = massive_wave();
    const Lattice lat({64}, {two_pi / 0.6}, {0.0});
    const CauchyData data = pw.sample_cauchy(lat);
    std::vector<int> steps_seen;
    std::vector<double> times_seen;
    oracle::leapfrog_evolve(
        data, 1.0, 1.0, 0.01, 40,
        [&](int step, double t, const ScalarField& psi, const ScalarField& psidot) {
            steps_seen.push_back(step);
            times_seen.push_back(t);
            CHECK(psi.lat == lat);
            CHECK(psidot.lat == lat);
        },
        10);
    CHECK(steps_seen == std::vector<int>{0, 10, 20, 30, 40});
    for (std::size_t i = 0; i < steps_seen.size(); ++i)
        CHECK(times_seen[i] == static_cast<double>(steps_seen[i]) * 0.01);
}

TEST_CASE("fixed-frame scheme rejects unstable and malformed requests") {
    const oracle::PlaneWave pw = massive_wave();
    const Lattice lat({64}, {two_pi / 0.6}, {0.0});
    const CauchyData data = pw.sample_cauchy(lat);
    const double bound = 0.5 * lat.min_spacing() / 1.0;
    try {
        oracle::leapfrog_evolve(data, 1.0, 1.0, 10.0 * bound, 5);
        FAIL("expected a CFL rejection");
    } catch (const CFLViolation& e) {
        CHECK(e.dt == doctest::Approx(10.0 * bound).epsilon(1e-15));
        CHECK(e.bound == doctest::Approx(bound).epsilon(1e-15));
    }
    CHECK_THROWS_AS(oracle::leapfrog_evolve(data, 1.0, 1.0, 0.01, 0), ConfigError);
    CHECK_THROWS_AS(oracle::leapfrog_evolve(data, 1.0, 1.0, 0.01, 5, {}, 0), ConfigError);
}

// ----------------------------------------------------------- clock period fit

TEST_CASE("cusp fit recovers the clock period from a sampled trace") {
    const oracle::PlaneWave pw = massive_wave();
    const std::vector<double> a = {1.0};
    const double expect = pw.clock_period();
    std::vector<double> t(4001), T(4001);
    for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] = 1.6 * expect * static_cast<double>(i) / 4000.0;
        T[i] = pw.clock_modulus(a, t[i]);
    }
    const double measured = measured_clock_period(t, T);
    CHECK(std::abs(measured - expect) / expect < 1e-6);
}

TEST_CASE("clock period fit rejects traces it cannot support") {
    CHECK_THROWS_AS(measured_clock_period({0.0, 1.0, 2.0}, {1.0, 0.5, 1.0}), ConfigError);
    CHECK_THROWS_AS(measured_clock_period({0, 1, 2, 3, 4}, {1, 2, 3}), ConfigError);
    // monotone trace: no cusps to intersect
    std::vector<double> t(100), T(100);
    for (std::size_t i = 0; i < 100; ++i) {
        t[i] = static_cast<double>(i);
        T[i] = 1.0 + static_cast<double>(i);
    }
    CHECK_THROWS_AS(measured_clock_period(t, T), ConfigError);
}
