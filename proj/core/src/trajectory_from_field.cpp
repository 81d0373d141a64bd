#include "kgc/trajectory_from_field.hpp"

#include <array>
#include <cmath>

#include "kgc/errors.hpp"
#include "kgc/interp.hpp"
#include "kgc/stencil.hpp"

namespace kgc {

double AmplitudeHistory::dt() const {
    if (t.size() < 2) throw InsufficientHistory("amplitude history needs at least two frames");
    return t[1] - t[0];
}

void AmplitudeHistory::validate() const {
    if (t.size() < 2) throw InsufficientHistory("amplitude history needs at least two frames");
    if (psi.size() != t.size() || psidot.size() != t.size())
        throw ConfigError("amplitude history frame counts disagree");
    const double step = dt();
    if (!(step > 0.0)) throw InsufficientHistory("amplitude frames are not increasing in time");
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (psi[k].lat != psi[0].lat || psidot[k].lat != psi[0].lat)
            throw ConfigError("amplitude history frames live on different grids");
        if (k + 1 < t.size() && std::abs(t[k + 1] - t[k] - step) > 1e-9 * step)
            throw InsufficientHistory("amplitude frames are not uniformly spaced");
    }
}

namespace {

// Time-frame bracket for an instant within the history.
struct Bracket {
    std::size_t k = 0;
    double theta = 0.0;
};

Bracket bracket(const AmplitudeHistory& hist, double time, double step) {
    const double s = (time - hist.t.front()) / step;
    const double slack = 1e-9;
    if (s < -slack || s > static_cast<double>(hist.t.size() - 1) + slack)
        throw InsufficientHistory("integration time left the stored amplitude history");
    Bracket b;
    if (s <= 0.0) {
        b.k = 0;
        b.theta = 0.0;
        return b;
    }
    b.k = static_cast<std::size_t>(s);
    if (b.k >= hist.t.size() - 1) {
        b.k = hist.t.size() - 2;
        b.theta = 1.0;
        return b;
    }
    b.theta = s - static_cast<double>(b.k);
    return b;
}

} // namespace

KgCongruenceState trajectories_from_amplitude(const AmplitudeHistory& hist,
                                              const Lattice& labels,
                                              const PhysicalConstants& pc, double dt, int steps,
                                              double velocity_floor,
                                              const PathObserver& observer) {
    hist.validate();
    if (steps < 1) throw ConfigError("path integration needs at least one step");
    if (!(dt > 0.0)) throw ConfigError("path integration needs a positive dt");
    const Lattice& grid = hist.psi.front().lat;
    if (grid.dim() != labels.dim())
        throw ConfigError("label lattice dimension does not match the amplitude grid");
    const int n = grid.dim();
    const double frame_dt = hist.dt();
    const double c2 = pc.c * pc.c;
    const double kappa = pc.kappa();

    // Spatial gradients once per frame; paths then only interpolate.
    std::vector<VectorField> grads;
    grads.reserve(hist.psi.size());
    for (const auto& frame : hist.psi) {
        VectorField g(grid, n, Variance::lower);
        for (int i = 0; i < n; ++i)
            fd_gradient(grid, frame.v, i, g.comp[static_cast<std::size_t>(i)]);
        grads.push_back(std::move(g));
    }

    double peak_rate = 0.0;
    for (double x : hist.psidot.front().v) peak_rate = std::max(peak_rate, std::abs(x));
    const double rate_floor = velocity_floor * peak_rate;

    const std::size_t paths = labels.size();
    VectorField q = identity_positions(labels);
    ScalarField tau(labels);

    // Rates (dq/dt, dtau/dt) for one path at a given position and time.
    auto rates = [&](std::size_t label, std::span<const double> x, double time,
                     std::span<double> v) -> double {
        const Bracket b = bracket(hist, time, frame_dt);
        const double w0 = 1.0 - b.theta, w1 = b.theta;
        const double pd = w0 * interpolate(hist.psidot[b.k], x) +
                          w1 * interpolate(hist.psidot[b.k + 1], x);
        if (!(std::abs(pd) >= rate_floor))
            throw VelocitySingularity(label, time, std::abs(pd));
        for (int i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(i);
            const double gr = w0 * interpolate(grid, grads[b.k].comp[c], x) +
                              w1 * interpolate(grid, grads[b.k + 1].comp[c], x);
            v[c] = -c2 * gr / pd;
        }
        const double ps =
            w0 * interpolate(hist.psi[b.k], x) + w1 * interpolate(hist.psi[b.k + 1], x);
        return kappa * ps / pd;
    };

    if (observer) observer(0, hist.t.front(), q, tau);

    std::array<double, Lattice::max_dim> x{}, v1{}, v2{}, v3{}, v4{}, xs{};
    const auto nn = static_cast<std::size_t>(n);
    double time = hist.t.front();
    for (int step = 1; step <= steps; ++step) {
        for (std::size_t l = 0; l < paths; ++l) {
            for (int i = 0; i < n; ++i)
                x[static_cast<std::size_t>(i)] = q.comp[static_cast<std::size_t>(i)][l];
            const double tau0 = tau.v[l];

            const std::span<const double> xv(x.data(), nn);
            const std::span<double> xsv(xs.data(), nn);

            const double k1t = rates(l, xv, time, std::span<double>(v1.data(), nn));
            for (std::size_t c = 0; c < nn; ++c) xs[c] = x[c] + 0.5 * dt * v1[c];
            const double k2t =
                rates(l, xsv, time + 0.5 * dt, std::span<double>(v2.data(), nn));
            for (std::size_t c = 0; c < nn; ++c) xs[c] = x[c] + 0.5 * dt * v2[c];
            const double k3t =
                rates(l, xsv, time + 0.5 * dt, std::span<double>(v3.data(), nn));
            for (std::size_t c = 0; c < nn; ++c) xs[c] = x[c] + dt * v3[c];
            const double k4t = rates(l, xsv, time + dt, std::span<double>(v4.data(), nn));

            for (std::size_t c = 0; c < nn; ++c)
                q.comp[c][l] = x[c] + dt / 6.0 * (v1[c] + 2.0 * v2[c] + 2.0 * v3[c] + v4[c]);
            tau.v[l] = tau0 + dt / 6.0 * (k1t + 2.0 * k2t + 2.0 * k3t + k4t);
        }
        time = hist.t.front() + static_cast<double>(step) * dt;
        if (observer) observer(step, time, q, tau);
    }

    // Assemble the full state with rates at the final time.
    KgCongruenceState out;
    out.t = time;
    out.q = q;
    out.qdot = VectorField(labels, n, Variance::upper);
    out.tau = tau;
    out.taudot = ScalarField(labels);
    out.rho0 = ScalarField(labels);
    for (std::size_t l = 0; l < paths; ++l) {
        for (int i = 0; i < n; ++i)
            x[static_cast<std::size_t>(i)] = q.comp[static_cast<std::size_t>(i)][l];
        const std::span<const double> xv(x.data(), nn);
        out.taudot.v[l] = rates(l, xv, time, std::span<double>(v1.data(), nn));
        for (std::size_t c = 0; c < nn; ++c) out.qdot.comp[c][l] = v1[c];
    }
    std::array<double, Lattice::max_dim> a{};
    const std::span<double> av(a.data(), nn);
    for (std::size_t l = 0; l < paths; ++l) {
        labels.position(l, av);
        out.rho0.v[l] = interpolate(hist.psidot.front(), av) / c2;
    }
    return out;
}

} // namespace kgc
