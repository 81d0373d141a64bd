#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "kgc/covariance.hpp"
#include "kgc/deposit.hpp"
#include "kgc/errors.hpp"

using namespace kgc;

namespace {

// Rigid translation with a frozen-rate internal displacement: q = a + v t,
// qdot = v, tau = taudot * t.  Linear in time, so Hermite interpolation is
// exact and every boost formula has a closed form.
KgHistory rigid_history(const Lattice& lat, double v, double taudot,
                        int frames = 5, double step = 0.1) {
    KgHistory hist;
    const int center = frames / 2;
    for (int f = 0; f < frames; ++f) {
        const double t = static_cast<double>(f - center) * step;
        KgCongruenceState s;
        s.t = t;
        s.q = identity_positions(lat);
        for (double& x : s.q.comp[0]) x += v * t;
        s.qdot = VectorField(lat, 1);
        for (double& x : s.qdot.comp[0]) x = v;
        s.tau = ScalarField(lat, taudot * t);
        s.taudot = ScalarField(lat, taudot);
        s.rho0 = ScalarField(lat);
        for (std::size_t l = 0; l < lat.size(); ++l) {
            const double a = lat.position(l)[0];
            s.rho0.v[l] = 1.5 + 0.5 * std::sin(2.0 * std::numbers::pi * a / lat.extent(0));
        }
        hist.states.push_back(std::move(s));
    }
    return hist;
}

Lattice small_lattice() { return Lattice({32}, {2.0}, {0.0}); }

} // namespace

// ------------------------------------------------------------------- history

TEST_CASE("history validates shape and spacing") {
    const Lattice lat = small_lattice();
    KgHistory hist = rigid_history(lat, 0.3, 0.25);
    hist.validate();
    CHECK(hist.dt() == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(hist.t_front() == -0.2);
    CHECK(hist.t_back() == doctest::Approx(0.2).epsilon(1e-15));

    KgHistory single;
    single.states.push_back(hist.states[0]);
    CHECK_THROWS_AS(single.validate(), InsufficientHistory);

    KgHistory skewed = rigid_history(lat, 0.3, 0.25);
    skewed.states[3].t += 0.04;
    CHECK_THROWS_AS(skewed.validate(), InsufficientHistory);

    KgHistory reversed = rigid_history(lat, 0.3, 0.25);
    std::swap(reversed.states.front(), reversed.states.back());
    CHECK_THROWS_AS(reversed.validate(), InsufficientHistory);
}

TEST_CASE("history interpolation is bitwise on frames and exact on rigid flows") {
    const Lattice lat = small_lattice();
    const double v = 0.3, td = 0.25;
    const KgHistory hist = rigid_history(lat, v, td);

    const KgCongruenceState on_frame = hist.at(hist.states[3].t);
    for (std::size_t l = 0; l < lat.size(); ++l) {
        CHECK(on_frame.q.comp[0][l] == hist.states[3].q.comp[0][l]);
        CHECK(on_frame.tau.v[l] == hist.states[3].tau.v[l]);
    }

    const double t = 0.05;    // between frames
    const KgCongruenceState mid = hist.at(t);
    for (std::size_t l = 0; l < lat.size(); ++l) {
        const double a = lat.position(l)[0];
        CHECK(mid.q.comp[0][l] == doctest::Approx(a + v * t).epsilon(1e-13));
        CHECK(mid.qdot.comp[0][l] == doctest::Approx(v).epsilon(1e-13));
        CHECK(mid.tau.v[l] == doctest::Approx(td * t).epsilon(1e-12));
        CHECK(mid.taudot.v[l] == doctest::Approx(td).epsilon(1e-13));
    }

    double q[1], qdot[1], tau, taudot;
    hist.sample(7, 0.13, q, qdot, tau, taudot);
    CHECK(q[0] == doctest::Approx(lat.position(7)[0] + v * 0.13).epsilon(1e-13));

    CHECK_THROWS_AS(hist.at(0.35), InsufficientHistory);
    CHECK_THROWS_AS(hist.at(-0.25), InsufficientHistory);
}

// --------------------------------------------------------------------- boost

TEST_CASE("boost velocities are capped well below c") {
    BoostParams empt;
    CHECK_THROWS_AS(empt.validate(1.0), ConfigError);

    BoostParams fast{{0.06}};
    CHECK_THROWS_AS(fast.validate(1.0), ConfigError);

    BoostParams ok{{0.049}};
    ok.validate(1.0);
    CHECK(!ok.is_zero());

    BoostParams diag{{0.03, 0.04}};
    CHECK(diag.speed() == doctest::Approx(0.05).epsilon(1e-14));

    BoostParams zero{{0.0}};
    CHECK(zero.is_zero());
}

TEST_CASE("material boost matches the closed form on a rigid flow") {
    const Lattice lat = small_lattice();
    const double v = 0.3, td = 0.25, c = 1.0;
    const KgHistory hist = rigid_history(lat, v, td);
    const double tprime = 0.05;

    const std::vector<std::uint8_t> mask =
        seam_interior_mask(lat, hist.states[2].q, std::vector<double>{1.0}, 0.1);

    for (const double u : {0.04, -0.04}) {
        const KgCongruenceState primed =
            boost_material(hist, BoostParams{{u}}, c, tprime);
        CHECK(primed.t == tprime);
        for (std::size_t l = 0; l < lat.size(); ++l) {
            if (!mask[l]) continue;
            const double a = lat.position(l)[0];
            const double ta = (tprime + u * a / (c * c)) / (1.0 - u * v / (c * c));
            CHECK(primed.q.comp[0][l] ==
                  doctest::Approx(a + (v - u) * ta).epsilon(1e-12));
            CHECK(primed.qdot.comp[0][l] ==
                  doctest::Approx(v - u + u * v * v / (c * c)).epsilon(1e-12));
            CHECK(primed.tau.v[l] == doctest::Approx(td * ta).epsilon(1e-11));
            CHECK(primed.taudot.v[l] ==
                  doctest::Approx((1.0 + u * v / (c * c)) * td).epsilon(1e-12));
        }
    }
}

TEST_CASE("zero boost returns the interpolated state, bitwise on frames") {
    const Lattice lat = small_lattice();
    const KgHistory hist = rigid_history(lat, 0.3, 0.25);
    const BoostParams none{{0.0}};

    const KgCongruenceState on_frame = boost_material(hist, none, 1.0, hist.states[3].t);
    for (std::size_t l = 0; l < lat.size(); ++l)
        CHECK(on_frame.q.comp[0][l] == hist.states[3].q.comp[0][l]);

    const KgCongruenceState mid = boost_material(hist, none, 1.0, 0.05);
    for (std::size_t l = 0; l < lat.size(); ++l)
        CHECK(mid.q.comp[0][l] ==
              doctest::Approx(lat.position(l)[0] + 0.3 * 0.05).epsilon(1e-13));

    BoostParams wrong_dim{{0.01, 0.0}};
    CHECK_THROWS_AS(boost_material(hist, wrong_dim, 1.0, 0.0), ConfigError);
}

// ---------------------------------------------------------------- seam mask

TEST_CASE("seam mask drops labels within the margin of a boosted edge") {
    const Lattice lat({20}, {1.0}, {0.0});
    const VectorField q = identity_positions(lat);
    const auto mask = seam_interior_mask(lat, q, std::vector<double>{1.0}, 0.13);
    int ones = 0;
    for (const auto m : mask) ones += m;
    CHECK(ones == 15);    // x in {0, .05, .1} and {.9, .95} are masked out
    CHECK(mask[0] == 0);
    CHECK(mask[2] == 0);
    CHECK(mask[3] == 1);
    CHECK(mask[10] == 1);
    CHECK(mask[17] == 1);
    CHECK(mask[18] == 0);

    const auto open = seam_interior_mask(lat, q, std::vector<double>{0.0}, 0.13);
    for (const auto m : open) CHECK(m == 1);
}

// -------------------------------------------------------------------- remap

TEST_CASE("label remap restores the initial chart on a rigid flow") {
    const Lattice lat = small_lattice();
    const double v = 0.3, td = 0.25, c = 1.0, u = 0.04;
    const KgHistory hist = rigid_history(lat, v, td);
    const RemappedLabels rm = label_remap(hist, BoostParams{{u}}, PhysicalConstants::natural(), 1e-6);

    const std::vector<std::uint8_t> mask =
        seam_interior_mask(lat, hist.states[2].q, std::vector<double>{u}, 0.1);
    const double det3 = c * c / (c * c - u * v);
    for (std::size_t l = 0; l < lat.size(); ++l) {
        if (!mask[l]) continue;
        const double a = lat.position(l)[0];
        const double tstar = u * a / (c * c - u * v);
        CHECK(rm.t_star.v[l] == doctest::Approx(tstar).epsilon(1e-12));
        CHECK(rm.a_prime.comp[0][l] == doctest::Approx(a + v * tstar).epsilon(1e-12));
        CHECK(rm.tau_star.v[l] == doctest::Approx(td * tstar).epsilon(1e-11));
        CHECK(rm.det3.v[l] == doctest::Approx(det3).epsilon(1e-10));
        CHECK(rm.jacobian_at_tstar.v[l] == doctest::Approx(1.0).epsilon(1e-12));
        const double rho0 = hist.states[2].rho0.v[l];
        CHECK(rm.rho0_prime.v[l] ==
              doctest::Approx(rho0 * std::exp(-td * tstar) / det3).epsilon(1e-10));
        CHECK(std::abs(rm.invariance.v[l]) < 1e-10);
    }
}

TEST_CASE("zero-velocity remap is the identity exactly") {
    const Lattice lat = small_lattice();
    const KgHistory hist = rigid_history(lat, 0.3, 0.25);
    const RemappedLabels rm =
        label_remap(hist, BoostParams{{0.0}}, PhysicalConstants::natural(), 1e-6);
    for (std::size_t l = 0; l < lat.size(); ++l) {
        CHECK(rm.t_star.v[l] == 0.0);
        CHECK(rm.a_prime.comp[0][l] == lat.position(l)[0]);
        CHECK(rm.det3.v[l] == 1.0);
        CHECK(rm.invariance.v[l] == 0.0);
    }
}

// ----------------------------------------------------------- spatial slices

TEST_CASE("spatial boost mixes density and momentum to first order") {
    const Lattice lat = small_lattice();
    const double v = 0.3, c = 1.0, u = 0.03;
    // frozen clock: every deposited slice is identical, so the closed form
    // has no time-derivative terms
    KgHistory hist = rigid_history(lat, v, 0.0);
    for (auto& s : hist.states) s.rho0 = ScalarField(lat, 0.8);
    const PhysicalConstants pc = PhysicalConstants::natural();
    std::vector<KgSpatialFields> slices;
    for (const auto& s : hist.states)
        slices.push_back(kg_deposit(s, pc, lat, DepositKernel::multilinear, 1e-3));

    const KgSpatialFields primed =
        boost_spatial(slices[1], slices[2], slices[3], BoostParams{{u}}, pc, 1e-3);
    for (std::size_t s = 0; s < lat.size(); ++s) {
        CHECK(primed.rho.v[s] == doctest::Approx(0.8 * (1.0 - u * v)).epsilon(1e-12));
        CHECK(primed.mom.comp[0][s] == doctest::Approx(0.8 * (v - u)).epsilon(1e-12));
        CHECK(primed.mom4.v[s] == 0.0);
        if (primed.valid[s])
            CHECK(primed.v.comp[0][s] ==
                  doctest::Approx((v - u) / (1.0 - u * v)).epsilon(1e-12));
    }

    const KgSpatialFields same =
        boost_spatial(slices[1], slices[2], slices[3], BoostParams{{0.0}}, pc, 1e-3);
    for (std::size_t s = 0; s < lat.size(); ++s)
        CHECK(same.rho.v[s] == slices[2].rho.v[s]);

    BoostParams wrong_dim{{0.01, 0.02}};
    CHECK_THROWS_AS(
        boost_spatial(slices[1], slices[2], slices[3], wrong_dim, pc, 1e-3), ConfigError);
    CHECK_THROWS_AS(
        boost_spatial(slices[3], slices[2], slices[1], BoostParams{{u}}, pc, 1e-3),
        InsufficientHistory);
}

TEST_CASE("scalar slices pick up only the coordinate pullback") {
    const Lattice lat = small_lattice();
    const double beta = 0.7, tcur = 0.4, frame_dt = 0.1, u = 0.02;
    const ScalarField prev(lat, beta * (tcur - frame_dt));
    const ScalarField cur(lat, beta * tcur);
    const ScalarField next(lat, beta * (tcur + frame_dt));
    const PhysicalConstants pc = PhysicalConstants::natural();

    const ScalarField primed =
        boost_spatial_scalar(prev, cur, next, frame_dt, tcur, BoostParams{{u}}, pc);
    for (std::size_t s = 0; s < lat.size(); ++s) {
        const double x = lat.position(s)[0];
        CHECK(primed.v[s] == doctest::Approx(beta * tcur + u * x * beta).epsilon(1e-13));
    }

    const ScalarField same =
        boost_spatial_scalar(prev, cur, next, frame_dt, tcur, BoostParams{{0.0}}, pc);
    for (std::size_t s = 0; s < lat.size(); ++s) CHECK(same.v[s] == cur.v[s]);
}

// ---------------------------------------------------------------------- scan

TEST_CASE("covariance scan validates its inputs") {
    const Lattice lat = small_lattice();
    const KgHistory hist = rigid_history(lat, 0.3, 0.25);
    const PhysicalConstants pc = PhysicalConstants::natural();
    std::vector<KgSpatialFields> slices;
    for (const auto& s : hist.states)
        slices.push_back(kg_deposit(s, pc, lat, DepositKernel::multilinear, 1e-3));
    const std::vector<double> dir = {1.0};
    const std::vector<double> mags = {0.01, 0.03};

    std::vector<KgSpatialFields> short_slices(slices.begin(), slices.end() - 1);
    CHECK_THROWS_WITH_AS(
        covariance_scan(hist, short_slices, pc, dir, mags, 20.0, 1e-3, 0.5, 2),
        "covariance scan needs one deposited slice per history frame", ConfigError);
    CHECK_THROWS_WITH_AS(covariance_scan(hist, slices, pc, dir, mags, 20.0, 1e-3, 0.5, 0),
                         "covariance center frame needs one neighbor slice on each side",
                         ConfigError);
    CHECK_THROWS_WITH_AS(
        covariance_scan(hist, slices, pc, dir, std::vector<double>{0.01}, 20.0, 1e-3, 0.5, 2),
        "covariance scan expects exactly two boost magnitudes", ConfigError);
    CHECK_THROWS_WITH_AS(
        covariance_scan(hist, slices, pc, dir, std::vector<double>{0.03, 0.01}, 20.0, 1e-3,
                        0.5, 2),
        "boost magnitudes must be positive and increasing", ConfigError);
    CHECK_THROWS_WITH_AS(covariance_scan(hist, slices, pc, dir, mags, 20.0, 1e-3, 0.0, 2),
                         "taudot_limit must be positive", ConfigError);
    CHECK_THROWS_WITH_AS(
        covariance_scan(hist, slices, pc, std::vector<double>{0.0}, mags, 20.0, 1e-3, 0.5, 2),
        "boost direction must be nonzero", ConfigError);
}

TEST_CASE("covariance scan reports one row per magnitude plus the floor") {
    const Lattice lat = small_lattice();
    const KgHistory hist = rigid_history(lat, 0.3, 0.25);
    const PhysicalConstants pc = PhysicalConstants::natural();
    std::vector<KgSpatialFields> slices;
    for (const auto& s : hist.states)
        slices.push_back(kg_deposit(s, pc, lat, DepositKernel::multilinear, 1e-3));
    const CovarianceReport rep =
        covariance_scan(hist, slices, pc, std::vector<double>{1.0},
                        std::vector<double>{0.01, 0.03}, 20.0, 1e-3, 0.5, 2);
    REQUIRE(rep.rows.size() == 3);
    CHECK(rep.rows[0].u == 0.0);
    CHECK(rep.rows[1].u == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(rep.rows[2].u == doctest::Approx(0.03).epsilon(1e-15));
    CHECK(!rep.rows[0].has_exponent);
    CHECK(rep.rows[2].has_exponent);
    CHECK(std::isfinite(rep.exponent_motion));
    CHECK(std::isfinite(rep.exponent_density));
}
