#include "kgc/reconstruct.hpp"

#include <array>
#include <cmath>

#include "kgc/deformation.hpp"
#include "kgc/errors.hpp"
#include "kgc/interp.hpp"

namespace kgc {

InverseMap::InverseMap(const VectorField& q, double tol_scale, int max_iter)
    : disp_(q.lat, q.ncomp(), Variance::upper), tol_(0.0), max_iter_(max_iter) {
    const Lattice& lat = q.lat;
    if (q.ncomp() != lat.dim())
        throw ConfigError("position field component count does not match the label lattice");
    double span = 0.0;
    for (int i = 0; i < lat.dim(); ++i) span = std::max(span, lat.extent(i));
    tol_ = tol_scale * span;

    std::array<double, Lattice::max_dim> a{};
    const std::span<double> as(a.data(), static_cast<std::size_t>(lat.dim()));
    for (std::size_t s = 0; s < lat.size(); ++s) {
        lat.position(s, as);
        for (int i = 0; i < lat.dim(); ++i) {
            const auto c = static_cast<std::size_t>(i);
            disp_.comp[c][s] = q.comp[c][s] - a[c];
        }
    }
}

void InverseMap::preimage(std::span<const double> x, std::span<double> a) const {
    const Lattice& lat = disp_.lat;
    const int n = lat.dim();
    for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
    for (int it = 0; it < max_iter_; ++it) {
        double shift = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(i);
            const double next = x[c] - interpolate(lat, disp_.comp[c], a);
            shift = std::max(shift, std::abs(next - a[c]));
            a[c] = next;
        }
        if (shift <= tol_) return;
    }
    throw Error("label preimage iteration did not converge (map too deformed to invert)");
}

std::vector<double> InverseMap::preimage(std::span<const double> x) const {
    std::vector<double> a(static_cast<std::size_t>(disp_.lat.dim()));
    preimage(x, a);
    return a;
}

namespace {

double uniform_dt(const std::vector<double>& times) {
    if (times.size() < 2) throw InsufficientHistory("need at least two frames to integrate");
    const double dt = times[1] - times[0];
    if (!(dt > 0.0)) throw InsufficientHistory("frames are not increasing in time");
    for (std::size_t k = 1; k + 1 < times.size(); ++k)
        if (std::abs(times[k + 1] - times[k] - dt) > 1e-9 * dt)
            throw InsufficientHistory("frames are not uniformly spaced");
    return dt;
}

std::vector<ScalarField> cumulative_trapezoid(const std::vector<ScalarField>& integrand,
                                              const ScalarField& psi0, double dt, double c2) {
    std::vector<ScalarField> out;
    out.reserve(integrand.size());
    out.push_back(psi0);
    for (std::size_t k = 1; k < integrand.size(); ++k) {
        ScalarField next = out.back();
        for (std::size_t s = 0; s < next.size(); ++s)
            next.v[s] += 0.5 * dt * c2 * (integrand[k - 1].v[s] + integrand[k].v[s]);
        out.push_back(std::move(next));
    }
    return out;
}

} // namespace

std::vector<ScalarField> reconstruct_amplitude(const std::vector<SpatialFields>& history,
                                               const ScalarField& psi0, double c) {
    std::vector<double> times;
    std::vector<ScalarField> rho;
    for (const auto& f : history) {
        times.push_back(f.t);
        rho.push_back(f.rho);
    }
    const double dt = uniform_dt(times);
    if (psi0.lat != history.front().rho.lat)
        throw ConfigError("initial amplitude is not on the deposit grid");
    return cumulative_trapezoid(rho, psi0, dt, c * c);
}

std::vector<ScalarField> reconstruct_amplitude_pullback(
    const std::vector<CongruenceState>& states, const ScalarField& psi0, double c,
    double jacobian_floor) {
    std::vector<double> times;
    for (const auto& s : states) times.push_back(s.t);
    const double dt = uniform_dt(times);

    const Lattice& grid = psi0.lat;
    std::vector<ScalarField> integrand;
    integrand.reserve(states.size());
    std::array<double, Lattice::max_dim> x{};
    std::array<double, Lattice::max_dim> a{};
    for (const auto& st : states) {
        const Lattice& labels = st.lattice();
        const std::span<double> xs(x.data(), static_cast<std::size_t>(grid.dim()));
        const std::span<double> as(a.data(), static_cast<std::size_t>(labels.dim()));

        const DeformationData def = deformation(st, jacobian_floor);
        ScalarField density(labels);  // rho0 / J on the labels
        for (std::size_t l = 0; l < labels.size(); ++l)
            density.v[l] = st.rho0.v[l] / def.J[l];

        const InverseMap inv(st.q);
        ScalarField frame(grid);
        for (std::size_t s = 0; s < grid.size(); ++s) {
            grid.position(s, xs);
            inv.preimage(xs, as);
            frame.v[s] = interpolate(density, as);
        }
        integrand.push_back(std::move(frame));
    }
    return cumulative_trapezoid(integrand, psi0, dt, c * c);
}

} // namespace kgc
