#pragma once

#include <functional>
#include <span>
#include <vector>

#include "kgc/congruence.hpp"
#include "kgc/constants.hpp"
#include "kgc/errors.hpp"
#include "kgc/field.hpp"

// Independent reference solutions used to pin expected values in tests and to
// cross-check the material solver.  Everything here is either a closed form
// or a standard grid scheme on the fixed-frame picture; nothing touches the
// congruence code paths it is used to validate.
namespace kgc::oracle {

// Monochromatic travelling solution psi = A cos(omega t - k.x - phase) with
// omega = c sqrt(|k|^2 + (m c / hbar)^2); massive = false drops the mass term
// so the same object covers the massless equation.
struct PlaneWave {
    std::vector<double> k;
    double amplitude = 1.0;
    double phase = 0.0;
    PhysicalConstants constants = PhysicalConstants::natural();
    bool massive = true;

    int dim() const { return static_cast<int>(k.size()); }
    double knorm2() const;
    double omega() const;

    // Fixed-frame amplitude and derivatives at (x, t).
    double theta(std::span<const double> x, double t) const;
    double psi(std::span<const double> x, double t) const;
    double psidot(std::span<const double> x, double t) const;
    double dpsi(int axis, std::span<const double> x, double t) const;

    // Flow map: every trajectory translates rigidly at c^2 k / omega.
    double velocity(int axis) const;
    std::vector<double> position(std::span<const double> a, double t) const;

    // Phase along the trajectory labelled a: advances at the uniform rate
    // 1 / (alpha^2 omega), so theta(a, t) = t / (alpha^2 omega) + theta(a, 0).
    // Massive only (the massless flow carries no internal clock).
    double label_phase(std::span<const double> a, double t) const;

    // Internal displacement and clock along the trajectory labelled a:
    //   tau  = -alpha log(|sin theta| / |sin theta0|),   tau(a, 0) = 0,
    //   T    = alpha exp(-tau / alpha),                  T(a, 0) = alpha.
    // Throws SingularLabel when the label sits on a node of the initial rate.
    double tau(std::span<const double> a, double t) const;
    double taudot(std::span<const double> a, double t) const;
    double clock_modulus(std::span<const double> a, double t) const;
    double clock_modulus_rate(std::span<const double> a, double t) const;

    // Lab-frame period of the internal clock modulus, 2 pi alpha^2 omega
    // (alpha omega is the kinematic dilation factor of the moving trajectory,
    // so this reduces to 2 pi alpha at k = 0).
    double clock_period() const;

    // Time at which the trajectory labelled a first reaches a phase node,
    // i.e. the end of its regular window: (distance of theta(a,0) to the
    // nearest multiple of pi) * alpha^2 omega.
    double regular_time(std::span<const double> a) const;

    // Cauchy data sampled on a lattice, for feeding either picture.
    CauchyData sample_cauchy(const Lattice& lat) const;
};

// General solution of the 1-D massless equation as two counter-propagating
// profiles, psi(x, t) = F(x - c t) + G(x + c t).
struct DAlembert {
    std::function<double(double)> F, G;    // profiles
    std::function<double(double)> Fp, Gp;  // their derivatives
    double c = 1.0;

    double psi(double x, double t) const { return F(x - c * t) + G(x + c * t); }
    double psidot(double x, double t) const { return c * (Gp(x + c * t) - Fp(x - c * t)); }
    double dpsi(double x, double t) const { return Fp(x - c * t) + Gp(x + c * t); }
};

// Fixed-frame three-level scheme for psi_tt = c^2 lap(psi) - (c kappa)^2 psi;
// kappa = 0 is the massless equation bit for bit (the mass term is skipped,
// not multiplied by zero).  Second-order in space and time.  on_frame, when
// set, receives every frame_every-th level together with a centered estimate
// of psidot there (the initial data counts as frame 0).
struct LeapfrogResult {
    ScalarField psi;
    ScalarField psidot;
    double t = 0.0;
    int steps = 0;
};

using FrameCallback =
    std::function<void(int step, double t, const ScalarField& psi, const ScalarField& psidot)>;

LeapfrogResult leapfrog_evolve(const CauchyData& cauchy, double c, double kappa, double dt,
                               int steps, const FrameCallback& on_frame = {},
                               int frame_every = 1, double cfl = 0.5);

// Discrete energy of the fixed-frame field,
//   sum_s [ psidot^2 - c^2 sum_i zeta_i (d_i psi)^2 + (c kappa psi)^2 ] dV,
// conserved by the exact flow; its drift measures scheme quality.
double field_energy(const ScalarField& psi, const ScalarField& psidot,
                    const MetricSignature& sig, double c, double kappa);

} // namespace kgc::oracle
