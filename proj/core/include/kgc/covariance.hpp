#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kgc/congruence.hpp"
#include "kgc/constants.hpp"
#include "kgc/deposit.hpp"
#include "kgc/serialize.hpp"

namespace kgc {

// Uniformly spaced history of massive-congruence snapshots, the substrate
// for boost transformations (which mix time with position and so need to
// evaluate the flow between stored frames).
struct KgHistory {
    std::vector<KgCongruenceState> states;

    double dt() const;
    double t_front() const { return states.front().t; }
    double t_back() const { return states.back().t; }
    void validate() const;

    // Per-label cubic Hermite interpolation in time (each frame stores value
    // and rate for every channel); exact frame hits return the stored values
    // bitwise.  Hermite rather than linear matters: the boost harness
    // evaluates labels a first-order-small offset away from frame times, and
    // linear interpolation would add an error linear in that offset, masking
    // the quadratic residual scaling it is trying to measure.
    void sample(std::size_t label, double time, std::span<double> q, std::span<double> qdot,
                double& tau, double& taudot) const;

    // Whole-state interpolation (bitwise copy at exact frame hits).
    KgCongruenceState at(double time) const;
};

// Infinitesimal boost velocity; first-order formulas only, so the magnitude
// is capped well below c.
struct BoostParams {
    std::vector<double> u;

    double speed() const;
    bool is_zero() const;
    void validate(double c) const;  // |u| <= 0.05 c
};

// Material-picture boost: the primed congruence at primed time tprime.  Each
// label keeps its identity; its primed data is read off at the label's own
// solved original time t_a (t_a = tprime + u.q(a, t_a)/c^2, fixed point), and
// rates transform to first order:
//   q'   = q - u t_a,          qdot' = qdot - u + (u.qdot) qdot / c^2,
//   tau' = tau,                taudot' = (1 + u.qdot/c^2) taudot.
// u = 0 returns the interpolated (at frame times: bitwise) state.
KgCongruenceState boost_material(const KgHistory& hist, const BoostParams& boost, double c,
                                 double tprime);

// Fixed-frame boost of one deposited slice, to first order in u, resampled
// on the original grid at nominal primed time equal to cur.t.  Neighbor
// slices supply the time derivatives.  The field-mixing terms follow the
// infinitesimal transformation law (density picks up -u.mom/c^2, momentum
// picks up -u rho, the internal channel is unmixed).
KgSpatialFields boost_spatial(const KgSpatialFields& prev, const KgSpatialFields& cur,
                              const KgSpatialFields& next, const BoostParams& boost,
                              const PhysicalConstants& pc, double rho_floor);

// Same first-order resampling for a plain scalar amplitude (psi is a boost
// scalar: it only picks up the coordinate pullback).
ScalarField boost_spatial_scalar(const ScalarField& prev, const ScalarField& cur,
                                 const ScalarField& next, double frame_dt, double tcur,
                                 const BoostParams& boost, const PhysicalConstants& pc);

// 1 for labels whose current position sits away from the periodic box edges
// along every boosted axis, 0 within margin_fraction of an edge.  u.x is
// discontinuous across the box seam in the folded chart, so boost residuals
// are meaningful on the interior mask only.
std::vector<std::uint8_t> seam_interior_mask(const Lattice& lat, const VectorField& q,
                                             std::span<const double> direction,
                                             double margin_fraction);

// Label-dependent relabeling that restores q'(a', t' = 0) = a': solves
// t* = u.q(a, t*)/c^2 per label (position folded into the box), maps
// a' = q(a, t*), and transforms the reduced density as a scalar density,
// rho0' = rho0 exp(-tau*/alpha)/det3.  `invariance` is the density check
//   det3 (1 - u.qdot(t*)/c^2) / J(a, t*) - 1,
// where det3 is the label-to-label determinant of the remap and J is the
// flow Jacobian interpolated to t*; the factor in the middle is the
// first-order density transformation, so the defect is O(u^2) plus
// differencing error (and exactly zero when u = 0).  t* has the sign of
// u.q and so falls on both sides of zero; the history must bracket the
// interval [-|u| L / c^2, +|u| L / c^2], i.e. include a few frames
// integrated backward from the initial data.  det3 and invariance carry
// garbage on seam labels (the remap displacement is not periodic); filter
// with seam_interior_mask before reading them.
struct RemappedLabels {
    VectorField a_prime;
    ScalarField t_star;
    ScalarField tau_star;
    ScalarField rho0_prime;
    ScalarField det3;
    ScalarField jacobian_at_tstar;
    ScalarField invariance;
};

RemappedLabels label_remap(const KgHistory& hist, const BoostParams& boost,
                           const PhysicalConstants& pc, double jacobian_floor);

// Two-point residual-scaling measurement.  For each magnitude the harness
// boosts both pictures in both directions, evaluates the signed material
// equation-of-motion residual (second time differences of the primed
// congruence against the primed acceleration) and the signed
// density-relation residual (boosted deposited density at the primed
// positions against rho0 exp(-tau'/alpha)/J'), and combines them by the
// centered second difference in the boost velocity,
// 0.5 (r(+u) + r(-u)) - r(0), which cancels the discretization floor and
// every odd-order stencil response sitewise.  The scaling exponent of the
// result is fitted between the two magnitudes; covariance holds when both
// exponents are ~2.
//
// Maxima are read over labels that are both seam-interior along the boost
// direction and clock-tame (|taudot| at the center frame within
// taudot_limit); seam labels carry chart discontinuities and near-singular
// clocks carry steep label-space structure, and both would otherwise inject
// first-order differencing artifacts into the quadratic measurement.
struct CovarianceReport {
    std::vector<CovarianceRow> rows;
    double exponent_motion = 0.0;
    double exponent_density = 0.0;
    bool pass = false;
};

CovarianceReport covariance_scan(const KgHistory& hist,
                                 const std::vector<KgSpatialFields>& deposits,
                                 const PhysicalConstants& pc, std::span<const double> direction,
                                 std::span<const double> magnitudes, double tau_bound,
                                 double rho_floor, double taudot_limit,
                                 std::size_t center_frame);

} // namespace kgc
