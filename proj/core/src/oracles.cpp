#include "kgc/oracles.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "kgc/stencil.hpp"

namespace kgc::oracle {

double PlaneWave::knorm2() const {
    double s = 0.0;
    for (double kr : k) s += kr * kr;
    return s;
}

double PlaneWave::omega() const {
    const double mc_hbar = massive ? constants.mc_over_hbar() : 0.0;
    const double w = constants.c * std::sqrt(knorm2() + mc_hbar * mc_hbar);
    // omega = 0 only for a massless wave with no wavevector; that mode does
    // not propagate and every derived quantity divides by omega.
    if (w == 0.0)
        throw DispersionViolation("zero-frequency mode: a massless plane wave needs a "
                                  "nonzero wavevector");
    return w;
}

double PlaneWave::theta(std::span<const double> x, double t) const {
    double u = omega() * t - phase;
    for (std::size_t r = 0; r < k.size(); ++r) u -= k[r] * x[r];
    return u;
}

double PlaneWave::psi(std::span<const double> x, double t) const {
    return amplitude * std::cos(theta(x, t));
}

double PlaneWave::psidot(std::span<const double> x, double t) const {
    return -amplitude * omega() * std::sin(theta(x, t));
}

double PlaneWave::dpsi(int axis, std::span<const double> x, double t) const {
    return amplitude * k[static_cast<std::size_t>(axis)] * std::sin(theta(x, t));
}

double PlaneWave::velocity(int axis) const {
    return constants.c * constants.c * k[static_cast<std::size_t>(axis)] / omega();
}

std::vector<double> PlaneWave::position(std::span<const double> a, double t) const {
    std::vector<double> q(a.begin(), a.end());
    for (std::size_t r = 0; r < k.size(); ++r) q[r] += velocity(static_cast<int>(r)) * t;
    return q;
}

double PlaneWave::label_phase(std::span<const double> a, double t) const {
    if (!massive) throw NotApplicable("massless flow carries no internal clock");
    const double alpha = constants.alpha();
    return t / (alpha * alpha * omega()) + theta(a, 0.0);
}

namespace {

double initial_sine(const PlaneWave& pw, std::span<const double> a) {
    const double s0 = std::sin(pw.theta(a, 0.0));
    if (s0 == 0.0) throw SingularLabel(0, s0);
    return s0;
}

} // namespace

double PlaneWave::tau(std::span<const double> a, double t) const {
    const double s0 = initial_sine(*this, a);
    const double st = std::sin(label_phase(a, t));
    return -constants.alpha() * std::log(std::abs(st) / std::abs(s0));
}

double PlaneWave::taudot(std::span<const double> a, double t) const {
    const double th = label_phase(a, t);
    return -1.0 / (constants.alpha() * omega() * std::tan(th));
}

double PlaneWave::clock_modulus(std::span<const double> a, double t) const {
    const double s0 = initial_sine(*this, a);
    const double st = std::sin(label_phase(a, t));
    return constants.alpha() * std::abs(st) / std::abs(s0);
}

double PlaneWave::clock_modulus_rate(std::span<const double> a, double t) const {
    const double s0 = initial_sine(*this, a);
    const double st = std::sin(label_phase(a, t));
    return -taudot(a, t) * std::abs(st) / std::abs(s0);
}

double PlaneWave::clock_period() const {
    if (!massive) throw NotApplicable("massless flow carries no internal clock");
    const double alpha = constants.alpha();
    return 2.0 * std::numbers::pi * alpha * alpha * omega();
}

double PlaneWave::regular_time(std::span<const double> a) const {
    if (!massive) throw NotApplicable("massless flow carries no internal clock");
    const double theta0 = theta(a, 0.0);
    const double dist = std::abs(std::remainder(theta0, std::numbers::pi));
    const double alpha = constants.alpha();
    return dist * alpha * alpha * omega();
}

CauchyData PlaneWave::sample_cauchy(const Lattice& lat) const {
    if (lat.dim() != dim()) throw ConfigError("wave vector dimension does not match the lattice");
    CauchyData cauchy{ScalarField(lat), ScalarField(lat)};
    std::array<double, Lattice::max_dim> x{};
    const std::span<double> xs(x.data(), static_cast<std::size_t>(lat.dim()));
    for (std::size_t s = 0; s < lat.size(); ++s) {
        lat.position(s, xs);
        cauchy.psi0.v[s] = psi(xs, 0.0);
        cauchy.psidot0.v[s] = psidot(xs, 0.0);
    }
    return cauchy;
}

LeapfrogResult leapfrog_evolve(const CauchyData& cauchy, double c, double kappa, double dt,
                               int steps, const FrameCallback& on_frame, int frame_every,
                               double cfl) {
    const Lattice& lat = cauchy.psi0.lat;
    if (cauchy.psidot0.lat != lat) throw ConfigError("cauchy fields live on different lattices");
    if (steps < 1) throw ConfigError("fixed-frame evolution needs at least one step");
    if (frame_every < 1) throw ConfigError("frame_every must be positive");
    const double bound = cfl * lat.min_spacing() / c;
    if (!(dt > 0.0) || dt > bound) throw CFLViolation(dt, bound);

    const std::size_t sites = lat.size();
    const double c2 = c * c;
    const double kappa2c2 = (kappa != 0.0) ? c2 * kappa * kappa : 0.0;

    std::vector<double> prev = cauchy.psi0.v;
    std::vector<double> cur(sites);
    std::vector<double> next(sites);
    std::vector<double> lap(sites);
    std::vector<double> scratch(sites);

    auto laplacian = [&](const std::vector<double>& f) {
        fd_second(lat, f, 0, lap);
        for (int ax = 1; ax < lat.dim(); ++ax) {
            fd_second(lat, f, ax, scratch);
            for (std::size_t s = 0; s < sites; ++s) lap[s] += scratch[s];
        }
    };

    ScalarField frame_psi(lat);
    ScalarField frame_dot(lat);
    if (on_frame) {
        frame_psi.v = prev;
        frame_dot.v = cauchy.psidot0.v;
        on_frame(0, 0.0, frame_psi, frame_dot);
    }

    // Taylor start: psi^1 = psi^0 + dt psidot^0 + dt^2/2 accel(psi^0).
    laplacian(prev);
    for (std::size_t s = 0; s < sites; ++s) {
        double acc = c2 * lap[s];
        if (kappa2c2 != 0.0) acc -= kappa2c2 * prev[s];
        cur[s] = prev[s] + dt * cauchy.psidot0.v[s] + 0.5 * dt * dt * acc;
    }

    for (int n = 1; n <= steps; ++n) {
        laplacian(cur);
        for (std::size_t s = 0; s < sites; ++s) {
            double acc = c2 * lap[s];
            if (kappa2c2 != 0.0) acc -= kappa2c2 * cur[s];
            next[s] = 2.0 * cur[s] - prev[s] + dt * dt * acc;
        }
        // `cur` is level n, `next` is level n+1: emit the centered rate at n.
        if (on_frame && n % frame_every == 0) {
            frame_psi.v = cur;
            for (std::size_t s = 0; s < sites; ++s)
                frame_dot.v[s] = (next[s] - prev[s]) / (2.0 * dt);
            on_frame(n, static_cast<double>(n) * dt, frame_psi, frame_dot);
        }
        if (n == steps) break;
        std::swap(prev, cur);
        std::swap(cur, next);
    }

    LeapfrogResult out{ScalarField(lat), ScalarField(lat), static_cast<double>(steps) * dt,
                       steps};
    out.psi.v = cur;
    for (std::size_t s = 0; s < sites; ++s) out.psidot.v[s] = (next[s] - prev[s]) / (2.0 * dt);
    return out;
}

double field_energy(const ScalarField& psi, const ScalarField& psidot,
                    const MetricSignature& sig, double c, double kappa) {
    const Lattice& lat = psi.lat;
    if (psidot.lat != lat) throw ConfigError("energy fields live on different lattices");
    const double c2 = c * c;
    const double kappa2c2 = c2 * kappa * kappa;
    double e = 0.0;
    for (std::size_t s = 0; s < lat.size(); ++s)
        e += psidot.v[s] * psidot.v[s] + kappa2c2 * psi.v[s] * psi.v[s];
    for (int ax = 0; ax < lat.dim(); ++ax) {
        ScalarField g = fd_gradient(psi, ax);
        const double zeta = sig.zeta(ax);
        for (std::size_t s = 0; s < lat.size(); ++s) e -= c2 * zeta * g.v[s] * g.v[s];
    }
    return e * lat.cell_volume();
}

} // namespace kgc::oracle
