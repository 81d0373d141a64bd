#include "kgc/dynamics.hpp"

#include <array>
#include <cmath>
#include <cstdlib>

#include "kgc/interp.hpp"
#include "kgc/stencil.hpp"

namespace kgc {

namespace {

// Degeneracy guard shared by both init routines: the material formulation
// divides by rho0, so a near-zero initial density is a data error, not a
// numerical event to ride through.
void check_density_floor(const ScalarField& rho0, double rel_floor) {
    double peak = 0.0;
    for (double x : rho0.v) peak = std::max(peak, std::abs(x));
    if (peak == 0.0) throw DegenerateDensity(0, 0.0, 0.0);
    const double floor = rel_floor * peak;
    for (std::size_t s = 0; s < rho0.size(); ++s)
        if (std::abs(rho0.v[s]) < floor) throw DegenerateDensity(s, std::abs(rho0.v[s]), floor);
}

} // namespace

VectorField identity_positions(const Lattice& lat) {
    VectorField q(lat, lat.dim(), Variance::upper);
    std::array<int, Lattice::max_dim> idx{};
    for (std::size_t s = 0; s < lat.size(); ++s) {
        lat.unravel(s, std::span<int>(idx.data(), static_cast<std::size_t>(lat.dim())));
        for (int i = 0; i < lat.dim(); ++i)
            q.comp[static_cast<std::size_t>(i)][s] =
                lat.coordinate(idx[static_cast<std::size_t>(i)], i);
    }
    return q;
}

CongruenceState init_wave(const CauchyData& cauchy, const SimConfig& cfg) {
    const Lattice& lat = cfg.lattice;
    if (cauchy.psi0.lat != lat || cauchy.psidot0.lat != lat)
        throw ConfigError("cauchy data is not sampled on the configured label lattice");

    CongruenceState st;
    st.t = 0.0;
    st.q = identity_positions(lat);
    st.qdot = VectorField(lat, lat.dim(), Variance::upper);
    st.rho0 = ScalarField(lat);

    const double inv_c2 = 1.0 / (cfg.constants.c * cfg.constants.c);
    for (std::size_t s = 0; s < lat.size(); ++s) st.rho0.v[s] = inv_c2 * cauchy.psidot0.v[s];
    check_density_floor(st.rho0, cfg.rho_floor);

    for (int i = 0; i < lat.dim(); ++i) {
        ScalarField grad = fd_gradient(cauchy.psi0, i);
        const double zeta = cfg.signature.zeta(i);
        for (std::size_t s = 0; s < lat.size(); ++s)
            st.qdot.comp[static_cast<std::size_t>(i)][s] = zeta * grad.v[s] / st.rho0.v[s];
    }
    return st;
}

KgCongruenceState init_kg(const CauchyData& cauchy, const SimConfig& cfg) {
    const Lattice& lat = cfg.lattice;
    if (cauchy.psi0.lat != lat || cauchy.psidot0.lat != lat)
        throw ConfigError("cauchy data is not sampled on the configured label lattice");

    KgCongruenceState st;
    st.t = 0.0;
    st.q = identity_positions(lat);
    st.qdot = VectorField(lat, lat.dim(), Variance::upper);
    st.tau = ScalarField(lat);
    st.taudot = ScalarField(lat);
    st.rho0 = ScalarField(lat);

    const PhysicalConstants& pc = cfg.constants;
    const double inv_c2 = 1.0 / (pc.c * pc.c);
    for (std::size_t s = 0; s < lat.size(); ++s) st.rho0.v[s] = inv_c2 * cauchy.psidot0.v[s];
    check_density_floor(st.rho0, cfg.rho_floor);

    // Spatial block of the reduction is all-minus: raising flips the sign.
    for (int r = 0; r < lat.dim(); ++r) {
        ScalarField grad = fd_gradient(cauchy.psi0, r);
        for (std::size_t s = 0; s < lat.size(); ++s)
            st.qdot.comp[static_cast<std::size_t>(r)][s] = -grad.v[s] / st.rho0.v[s];
    }
    const double m_over_hbar = pc.mass / pc.hbar;
    for (std::size_t s = 0; s < lat.size(); ++s)
        st.taudot.v[s] = m_over_hbar * cauchy.psi0.v[s] / st.rho0.v[s];
    return st;
}

VectorField wave_acceleration(const CongruenceState& s, const MetricSignature& sig,
                              const PhysicalConstants& pc, double jacobian_floor) {
    const Lattice& lat = s.lattice();
    const int n = s.dim();
    const std::size_t sites = lat.size();
    const double c2 = pc.c * pc.c;

    const DeformationData def = deformation(s, jacobian_floor);

    VectorField qddot(lat, n, Variance::upper);
    std::vector<double> bracket(sites);
    std::vector<double> grad(sites);

    for (int i = 0; i < n; ++i) {
        auto& out = qddot.comp[static_cast<std::size_t>(i)];
        const auto& qdi = s.qdot.comp[static_cast<std::size_t>(i)];
        for (int j = 0; j < n; ++j) {
            const auto& qdj = s.qdot.comp[static_cast<std::size_t>(j)];
            const double g_ij = sig.g(i, j);
#pragma omp parallel for schedule(static)
            for (long long ss = 0; ss < static_cast<long long>(sites); ++ss) {
                const auto si = static_cast<std::size_t>(ss);
                bracket[si] = s.rho0.v[si] / def.J[si] * (c2 * g_ij + qdi[si] * qdj[si]);
            }
            for (int l = 0; l < n; ++l) {
                fd_gradient(lat, bracket, l, grad);
#pragma omp parallel for schedule(static)
                for (long long ss = 0; ss < static_cast<long long>(sites); ++ss) {
                    const auto si = static_cast<std::size_t>(ss);
                    out[si] += def.a(si, l, j) * grad[si] / s.rho0.v[si];
                }
            }
        }
    }
    return qddot;
}

KgAcceleration kg_acceleration(const KgCongruenceState& s, const PhysicalConstants& pc,
                               double jacobian_floor, double tau_bound) {
    const Lattice& lat = s.lattice();
    const int n = s.dim();
    const std::size_t sites = lat.size();
    const double c2 = pc.c * pc.c;
    const double kappa = pc.kappa();

    // Divergence check first: past the regular window tau runs away much
    // faster than the spatial map deforms, and the error should say so.
    for (std::size_t si = 0; si < sites; ++si) {
        if (!(std::abs(s.tau.v[si]) <= tau_bound) || !std::isfinite(s.taudot.v[si]))
            throw RegularWindowExceeded(si, s.t, s.tau.v[si]);
    }

    const DeformationData def = deformation(s, jacobian_floor);

    std::vector<std::vector<double>> grad_tau(static_cast<std::size_t>(n));
    for (int l = 0; l < n; ++l) fd_gradient(lat, s.tau.v, l, grad_tau[static_cast<std::size_t>(l)]);

    KgAcceleration acc;
    acc.qddot = VectorField(lat, n, Variance::upper);
    acc.tauddot = ScalarField(lat);

    std::vector<double> bracket(sites);
    std::vector<double> grad(sites);

    // Spatial equations: bracket B^rs = rho0 J^-1 (-c^2 delta^rs + qdot^r qdot^s).
    for (int r = 0; r < n; ++r) {
        auto& out = acc.qddot.comp[static_cast<std::size_t>(r)];
        const auto& qdr = s.qdot.comp[static_cast<std::size_t>(r)];
        for (int j = 0; j < n; ++j) {
            const auto& qdj = s.qdot.comp[static_cast<std::size_t>(j)];
            const double diag = (r == j) ? -c2 : 0.0;
#pragma omp parallel for schedule(static)
            for (long long ss = 0; ss < static_cast<long long>(sites); ++ss) {
                const auto si = static_cast<std::size_t>(ss);
                bracket[si] = s.rho0.v[si] / def.J[si] * (diag + qdr[si] * qdj[si]);
            }
            for (int l = 0; l < n; ++l) {
                fd_gradient(lat, bracket, l, grad);
                const auto& gtau = grad_tau[static_cast<std::size_t>(l)];
#pragma omp parallel for schedule(static)
                for (long long ss = 0; ss < static_cast<long long>(sites); ++ss) {
                    const auto si = static_cast<std::size_t>(ss);
                    out[si] += def.a(si, l, j) * (grad[si] - kappa * gtau[si] * bracket[si]) /
                               s.rho0.v[si];
                }
            }
        }
        // Explicit coupling term kappa qdot^r taudot.
#pragma omp parallel for schedule(static)
        for (long long ss = 0; ss < static_cast<long long>(sites); ++ss) {
            const auto si = static_cast<std::size_t>(ss);
            out[si] += kappa * qdr[si] * s.taudot.v[si];
        }
    }

    // Internal equation: bracket C^s = rho0 J^-1 taudot qdot^s.
    for (int j = 0; j < n; ++j) {
        const auto& qdj = s.qdot.comp[static_cast<std::size_t>(j)];
#pragma omp parallel for schedule(static)
        for (long long ss = 0; ss < static_cast<long long>(sites); ++ss) {
            const auto si = static_cast<std::size_t>(ss);
            bracket[si] = s.rho0.v[si] / def.J[si] * s.taudot.v[si] * qdj[si];
        }
        for (int l = 0; l < n; ++l) {
            fd_gradient(lat, bracket, l, grad);
            const auto& gtau = grad_tau[static_cast<std::size_t>(l)];
#pragma omp parallel for schedule(static)
            for (long long ss = 0; ss < static_cast<long long>(sites); ++ss) {
                const auto si = static_cast<std::size_t>(ss);
                acc.tauddot.v[si] += def.a(si, l, j) *
                                     (grad[si] - kappa * gtau[si] * bracket[si]) / s.rho0.v[si];
            }
        }
    }
#pragma omp parallel for schedule(static)
    for (long long ss = 0; ss < static_cast<long long>(sites); ++ss) {
        const auto si = static_cast<std::size_t>(ss);
        acc.tauddot.v[si] += kappa * (1.0 + s.taudot.v[si] * s.taudot.v[si]);
    }
    return acc;
}

// ---------------------------------------------------------------------------
// RK4 stepping

namespace {

void axpy(std::vector<double>& y, double a, const std::vector<double>& x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

} // namespace

void rk4_step(CongruenceState& s, const MetricSignature& sig, const PhysicalConstants& pc,
              double jacobian_floor, double dt) {
    const int n = s.dim();
    const double t0 = s.t;

    auto eval = [&](const CongruenceState& stage, int stage_no) {
        try {
            return wave_acceleration(stage, sig, pc, jacobian_floor);
        } catch (Error& e) {
            e.annotate("rk4 stage " + std::to_string(stage_no));
            throw;
        }
    };

    CongruenceState stage = s;
    const VectorField k1v = s.qdot;
    const VectorField k1a = eval(s, 1);

    stage.t = t0 + 0.5 * dt;
    for (int i = 0; i < n; ++i) {
        auto c = static_cast<std::size_t>(i);
        stage.q.comp[c] = s.q.comp[c];
        axpy(stage.q.comp[c], 0.5 * dt, k1v.comp[c]);
        stage.qdot.comp[c] = s.qdot.comp[c];
        axpy(stage.qdot.comp[c], 0.5 * dt, k1a.comp[c]);
    }
    const VectorField k2v = stage.qdot;
    const VectorField k2a = eval(stage, 2);

    for (int i = 0; i < n; ++i) {
        auto c = static_cast<std::size_t>(i);
        stage.q.comp[c] = s.q.comp[c];
        axpy(stage.q.comp[c], 0.5 * dt, k2v.comp[c]);
        stage.qdot.comp[c] = s.qdot.comp[c];
        axpy(stage.qdot.comp[c], 0.5 * dt, k2a.comp[c]);
    }
    const VectorField k3v = stage.qdot;
    const VectorField k3a = eval(stage, 3);

    stage.t = t0 + dt;
    for (int i = 0; i < n; ++i) {
        auto c = static_cast<std::size_t>(i);
        stage.q.comp[c] = s.q.comp[c];
        axpy(stage.q.comp[c], dt, k3v.comp[c]);
        stage.qdot.comp[c] = s.qdot.comp[c];
        axpy(stage.qdot.comp[c], dt, k3a.comp[c]);
    }
    const VectorField k4v = stage.qdot;
    const VectorField k4a = eval(stage, 4);

    const double w1 = dt / 6.0, w2 = dt / 3.0;
    for (int i = 0; i < n; ++i) {
        auto c = static_cast<std::size_t>(i);
        axpy(s.q.comp[c], w1, k1v.comp[c]);
        axpy(s.q.comp[c], w2, k2v.comp[c]);
        axpy(s.q.comp[c], w2, k3v.comp[c]);
        axpy(s.q.comp[c], w1, k4v.comp[c]);
        axpy(s.qdot.comp[c], w1, k1a.comp[c]);
        axpy(s.qdot.comp[c], w2, k2a.comp[c]);
        axpy(s.qdot.comp[c], w2, k3a.comp[c]);
        axpy(s.qdot.comp[c], w1, k4a.comp[c]);
    }
    s.t = t0 + dt;
}

void rk4_step(KgCongruenceState& s, const PhysicalConstants& pc, double jacobian_floor,
              double tau_bound, double dt) {
    const int n = s.dim();
    const double t0 = s.t;

    auto eval = [&](const KgCongruenceState& stage, int stage_no) {
        try {
            return kg_acceleration(stage, pc, jacobian_floor, tau_bound);
        } catch (Error& e) {
            e.annotate("rk4 stage " + std::to_string(stage_no));
            throw;
        }
    };

    auto advance = [&](KgCongruenceState& stage, double h, const KgCongruenceState& base,
                       const VectorField& kv, const ScalarField& ktau, const KgAcceleration& ka) {
        for (int i = 0; i < n; ++i) {
            auto c = static_cast<std::size_t>(i);
            stage.q.comp[c] = base.q.comp[c];
            axpy(stage.q.comp[c], h, kv.comp[c]);
            stage.qdot.comp[c] = base.qdot.comp[c];
            axpy(stage.qdot.comp[c], h, ka.qddot.comp[c]);
        }
        stage.tau.v = base.tau.v;
        axpy(stage.tau.v, h, ktau.v);
        stage.taudot.v = base.taudot.v;
        axpy(stage.taudot.v, h, ka.tauddot.v);
    };

    KgCongruenceState stage = s;
    const VectorField k1v = s.qdot;
    const ScalarField k1t = s.taudot;
    const KgAcceleration k1a = eval(s, 1);

    stage.t = t0 + 0.5 * dt;
    advance(stage, 0.5 * dt, s, k1v, k1t, k1a);
    const VectorField k2v = stage.qdot;
    const ScalarField k2t = stage.taudot;
    const KgAcceleration k2a = eval(stage, 2);

    advance(stage, 0.5 * dt, s, k2v, k2t, k2a);
    const VectorField k3v = stage.qdot;
    const ScalarField k3t = stage.taudot;
    const KgAcceleration k3a = eval(stage, 3);

    stage.t = t0 + dt;
    advance(stage, dt, s, k3v, k3t, k3a);
    const VectorField k4v = stage.qdot;
    const ScalarField k4t = stage.taudot;
    const KgAcceleration k4a = eval(stage, 4);

    const double w1 = dt / 6.0, w2 = dt / 3.0;
    for (int i = 0; i < n; ++i) {
        auto c = static_cast<std::size_t>(i);
        axpy(s.q.comp[c], w1, k1v.comp[c]);
        axpy(s.q.comp[c], w2, k2v.comp[c]);
        axpy(s.q.comp[c], w2, k3v.comp[c]);
        axpy(s.q.comp[c], w1, k4v.comp[c]);
        axpy(s.qdot.comp[c], w1, k1a.qddot.comp[c]);
        axpy(s.qdot.comp[c], w2, k2a.qddot.comp[c]);
        axpy(s.qdot.comp[c], w2, k3a.qddot.comp[c]);
        axpy(s.qdot.comp[c], w1, k4a.qddot.comp[c]);
    }
    axpy(s.tau.v, w1, k1t.v);
    axpy(s.tau.v, w2, k2t.v);
    axpy(s.tau.v, w2, k3t.v);
    axpy(s.tau.v, w1, k4t.v);
    axpy(s.taudot.v, w1, k1a.tauddot.v);
    axpy(s.taudot.v, w2, k2a.tauddot.v);
    axpy(s.taudot.v, w2, k3a.tauddot.v);
    axpy(s.taudot.v, w1, k4a.tauddot.v);
    s.t = t0 + dt;
}

void rk4_step_scalar(double& y, double& ydot, double (*accel)(double, double), double dt) {
    const double k1v = ydot, k1a = accel(y, ydot);
    const double k2v = ydot + 0.5 * dt * k1a, k2a = accel(y + 0.5 * dt * k1v, k2v);
    const double k3v = ydot + 0.5 * dt * k2a, k3a = accel(y + 0.5 * dt * k2v, k3v);
    const double k4v = ydot + dt * k3a, k4a = accel(y + dt * k3v, k4v);
    y += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    ydot += dt / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
}

ScalarField pullback(const ScalarField& grid_field, const VectorField& q) {
    ScalarField out(q.lat);
    const int n = q.ncomp();
    std::array<double, Lattice::max_dim> x{};
    for (std::size_t s = 0; s < q.lat.size(); ++s) {
        for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = q.comp[static_cast<std::size_t>(i)][s];
        out.v[s] = interpolate(grid_field, std::span<const double>(x.data(), static_cast<std::size_t>(n)));
    }
    return out;
}

} // namespace kgc
