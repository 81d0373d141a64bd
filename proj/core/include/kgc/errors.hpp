#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kgc {

// Base class for every detected model or usage failure.  Failures are never
// reported through sentinel values: if an invariant breaks, we throw.
class Error : public std::exception {
public:
    explicit Error(std::string msg) : msg_(std::move(msg)) {}
    const char* what() const noexcept override { return msg_.c_str(); }

    // Appends context (e.g. "during rk4 stage 2") while a failure unwinds.
    void annotate(const std::string& note) {
        msg_ += " [";
        msg_ += note;
        msg_ += "]";
    }

private:
    std::string msg_;
};

// The deformation determinant dropped to or below the configured floor.
// Trajectories have crossed (or are about to); the material map is no longer
// invertible and everything downstream of it is meaningless.
class JacobianCollapse : public Error {
public:
    JacobianCollapse(std::size_t site, double time, double jacobian)
        : Error("jacobian collapse at site " + std::to_string(site) + ", t = " +
                std::to_string(time) + " (J = " + std::to_string(jacobian) + ")"),
          site(site), time(time), jacobian(jacobian) {}

    std::size_t site;
    double time;
    double jacobian;
};

// Initial density magnitude below the relative floor somewhere on the lattice.
class DegenerateDensity : public Error {
public:
    DegenerateDensity(std::size_t site, double value, double floor)
        : Error("degenerate initial density at site " + std::to_string(site) +
                " (|rho0| = " + std::to_string(value) + " < floor " +
                std::to_string(floor) + ")"),
          site(site), value(value), floor(floor) {}

    std::size_t site;
    double value;
    double floor;
};

// A time-derivative stencil or a boost resample asked for snapshots the
// stored history does not contain.
class InsufficientHistory : public Error {
public:
    using Error::Error;
};

// dt violates the advection bound for the lattice in use.
class CFLViolation : public Error {
public:
    CFLViolation(double dt, double bound)
        : Error("time step dt = " + std::to_string(dt) +
                " violates the CFL bound dt <= " + std::to_string(bound)),
          dt(dt), bound(bound) {}

    double dt;
    double bound;
};

// Requested diagnostic is undefined for the given dimension (e.g. a curl
// check in one dimension).
class NotApplicable : public Error {
public:
    using Error::Error;
};

// |tau| left the configured regular window: the internal-clock variable is
// diverging and the congruence is past its first singular time.
class RegularWindowExceeded : public Error {
public:
    RegularWindowExceeded(std::size_t site, double time, double tau)
        : Error("regular window exceeded at site " + std::to_string(site) +
                ", t = " + std::to_string(time) + " (tau = " + std::to_string(tau) + ")"),
          site(site), time(time), tau(tau) {}

    std::size_t site;
    double time;
    double tau;
};

// |psi_dot| fell below the floor along an integrated path; the first-order
// velocity formula divides by it.
class VelocitySingularity : public Error {
public:
    VelocitySingularity(std::size_t label, double time, double value)
        : Error("velocity singularity on path " + std::to_string(label) + " at t = " +
                std::to_string(time) + " (|psi_dot| = " + std::to_string(value) + ")"),
          label(label), time(time), value(value) {}

    std::size_t label;
    double time;
    double value;
};

// A plane-wave clock is undefined at labels where sin(k.a + phase) vanishes.
class SingularLabel : public Error {
public:
    SingularLabel(std::size_t label, double value)
        : Error("singular label " + std::to_string(label) +
                " (|sin(k.a + phase)| = " + std::to_string(value) + ")"),
          label(label), value(value) {}

    std::size_t label;
    double value;
};

// The scalar equation for the per-label boost time has no solution inside the
// stored history window.
class RootNotBracketed : public Error {
public:
    RootNotBracketed(std::size_t label, double value)
        : Error("boost time for label " + std::to_string(label) +
                " not bracketed by the stored history (t = " + std::to_string(value) + ")"),
          label(label), value(value) {}

    std::size_t label;
    double value;
};

// Plane-wave parameters that do not satisfy the dispersion relation.
class DispersionViolation : public Error {
public:
    using Error::Error;
};

// Malformed configuration file, bad units, or inconsistent run parameters.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace kgc
