#pragma once

#include "kgc/errors.hpp"

namespace kgc {

// Physical constants for the massive model.  All strictly positive; the
// derived time scale alpha = hbar / (m c^2) sets the internal-clock unit and
// the tau regularity bound.
struct PhysicalConstants {
    double c = 1.0;
    double hbar = 1.0;
    double mass = 1.0;

    PhysicalConstants() = default;
    PhysicalConstants(double c_, double hbar_, double mass_) : c(c_), hbar(hbar_), mass(mass_) {
        validate();
    }

    static PhysicalConstants natural() { return PhysicalConstants(1.0, 1.0, 1.0); }

    void validate() const {
        if (!(c > 0.0) || !(hbar > 0.0) || !(mass > 0.0))
            throw ConfigError("physical constants must be strictly positive");
    }

    double alpha() const { return hbar / (mass * c * c); }

    // Frequency mc^2/hbar = 1/alpha, the coefficient of the coupling terms.
    double kappa() const { return mass * c * c / hbar; }

    // Spatial wavenumber scale mc/hbar appearing in the field relations.
    double mc_over_hbar() const { return mass * c / hbar; }
};

} // namespace kgc
