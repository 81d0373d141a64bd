#pragma once

#include <span>
#include <vector>

#include "kgc/deposit.hpp"

namespace kgc {

// Inverse of the label-to-position map for one congruence snapshot: given a
// spatial point x, finds the label a with q(a) = x by fixed-point iteration
// on the periodic displacement, a <- x - (q - id)(a).  Built once per state;
// cheap to query per point.  Throws on non-convergence (the map is assumed
// invertible; failure here means the congruence is too deformed for the
// first-order inverse, which callers treat as a runtime failure).
class InverseMap {
public:
    explicit InverseMap(const VectorField& q, double tol_scale = 1e-13, int max_iter = 60);

    void preimage(std::span<const double> x, std::span<double> a) const;
    std::vector<double> preimage(std::span<const double> x) const;

private:
    VectorField disp_;
    double tol_;
    int max_iter_;
};

// Amplitude from the deposited density history: at every grid node,
//   psi_k = psi0 + c^2 * (trapezoidal time integral of rho up to frame k).
// Returns one amplitude frame per input frame (frame 0 is psi0 itself).
// History must be uniformly spaced from t = 0.
std::vector<ScalarField> reconstruct_amplitude(const std::vector<SpatialFields>& history,
                                               const ScalarField& psi0, double c);

// Same quadrature with the integrand evaluated through the inverse map
// instead of deposits: integrand(x) = c^2 (rho0 / J) at the label preimage
// of x.  An independent cross-check of the deposit route.
std::vector<ScalarField> reconstruct_amplitude_pullback(
    const std::vector<CongruenceState>& states, const ScalarField& psi0, double c,
    double jacobian_floor);

} // namespace kgc
