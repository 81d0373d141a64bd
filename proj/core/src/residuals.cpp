#include "kgc/residuals.hpp"

#include <cmath>

#include "kgc/errors.hpp"
#include "kgc/stencil.hpp"

namespace kgc {

namespace {

double history_dt(const std::vector<double>& times) {
    if (times.size() < 3) throw InsufficientHistory("need at least three uniformly spaced frames");
    const double dt = times[1] - times[0];
    if (!(dt > 0.0)) throw InsufficientHistory("history frames are not increasing in time");
    for (std::size_t k = 1; k + 1 < times.size(); ++k) {
        const double step = times[k + 1] - times[k];
        if (std::abs(step - dt) > 1e-9 * std::abs(dt))
            throw InsufficientHistory("history frames are not uniformly spaced");
    }
    return dt;
}

} // namespace

double continuity_residual(const std::vector<SpatialFields>& history) {
    std::vector<double> times;
    for (const auto& f : history) times.push_back(f.t);
    const double dt = history_dt(times);
    const Lattice& grid = history.front().rho.lat;
    const int n = grid.dim();

    double worst = 0.0;
    std::vector<double> div(grid.size());
    std::vector<double> grad(grid.size());
    for (std::size_t k = 1; k + 1 < history.size(); ++k) {
        div.assign(grid.size(), 0.0);
        for (int i = 0; i < n; ++i) {
            fd_gradient(grid, history[k].mom.comp[static_cast<std::size_t>(i)], i, grad);
            for (std::size_t s = 0; s < grid.size(); ++s) div[s] += grad[s];
        }
        for (std::size_t s = 0; s < grid.size(); ++s) {
            const double drho = (history[k + 1].rho.v[s] - history[k - 1].rho.v[s]) / (2.0 * dt);
            worst = std::max(worst, std::abs(drho + div[s]));
        }
    }
    return worst;
}

double kg_continuity_residual(const std::vector<KgSpatialFields>& history,
                              const PhysicalConstants& pc) {
    std::vector<double> times;
    for (const auto& f : history) times.push_back(f.t);
    const double dt = history_dt(times);
    const Lattice& grid = history.front().rho.lat;
    const int n = grid.dim();
    const double mc_hbar = pc.mc_over_hbar();

    double worst = 0.0;
    std::vector<double> div(grid.size());
    std::vector<double> grad(grid.size());
    for (std::size_t k = 1; k + 1 < history.size(); ++k) {
        div.assign(grid.size(), 0.0);
        for (int i = 0; i < n; ++i) {
            fd_gradient(grid, history[k].mom.comp[static_cast<std::size_t>(i)], i, grad);
            for (std::size_t s = 0; s < grid.size(); ++s) div[s] += grad[s];
        }
        for (std::size_t s = 0; s < grid.size(); ++s) {
            const double drho = (history[k + 1].rho.v[s] - history[k - 1].rho.v[s]) / (2.0 * dt);
            worst = std::max(worst, std::abs(drho + div[s] + mc_hbar * history[k].mom4.v[s]));
        }
    }
    return worst;
}

double euler_residual(const std::vector<SpatialFields>& history, const MetricSignature& sig,
                      double c) {
    std::vector<double> times;
    for (const auto& f : history) times.push_back(f.t);
    const double dt = history_dt(times);
    const Lattice& grid = history.front().rho.lat;
    const int n = grid.dim();
    const double c2 = c * c;

    double worst = 0.0;
    std::vector<double> grad(grid.size());
    for (std::size_t k = 1; k + 1 < history.size(); ++k) {
        for (int i = 0; i < n; ++i) {
            fd_gradient(grid, history[k].rho.v, i, grad);
            const double zeta = sig.zeta(i);
            const auto& prev = history[k - 1].mom.comp[static_cast<std::size_t>(i)];
            const auto& next = history[k + 1].mom.comp[static_cast<std::size_t>(i)];
            for (std::size_t s = 0; s < grid.size(); ++s) {
                const double dmom = (next[s] - prev[s]) / (2.0 * dt);
                worst = std::max(worst, std::abs(dmom - c2 * zeta * grad[s]));
            }
        }
    }
    return worst;
}

double gradient_condition_residual(const SpatialFields& fields, const MetricSignature& sig) {
    const Lattice& grid = fields.rho.lat;
    const int n = grid.dim();
    if (n < 2) throw NotApplicable("the antisymmetrized gradient check needs two or more axes");

    double worst = 0.0;
    std::vector<double> di_mj(grid.size());
    std::vector<double> dj_mi(grid.size());
    std::vector<double> lower_i(grid.size());
    std::vector<double> lower_j(grid.size());
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const auto ci = static_cast<std::size_t>(i), cj = static_cast<std::size_t>(j);
            for (std::size_t s = 0; s < grid.size(); ++s) {
                lower_i[s] = sig.zeta(i) * fields.mom.comp[ci][s];
                lower_j[s] = sig.zeta(j) * fields.mom.comp[cj][s];
            }
            fd_gradient(grid, lower_j, i, di_mj);
            fd_gradient(grid, lower_i, j, dj_mi);
            for (std::size_t s = 0; s < grid.size(); ++s)
                worst = std::max(worst, std::abs(di_mj[s] - dj_mi[s]));
        }
    }
    return worst;
}

double wave_equation_residual(const std::vector<ScalarField>& frames, double dt, double c,
                              double kappa) {
    if (frames.size() < 3) throw InsufficientHistory("need at least three amplitude frames");
    if (!(dt > 0.0)) throw InsufficientHistory("amplitude frames need a positive time spacing");
    const Lattice& grid = frames.front().lat;
    const double inv_c2dt2 = 1.0 / (c * c * dt * dt);
    const double kappa2 = kappa * kappa;

    double worst = 0.0;
    std::vector<double> lap(grid.size());
    std::vector<double> scratch(grid.size());
    for (std::size_t k = 1; k + 1 < frames.size(); ++k) {
        fd_second(grid, frames[k].v, 0, lap);
        for (int ax = 1; ax < grid.dim(); ++ax) {
            fd_second(grid, frames[k].v, ax, scratch);
            for (std::size_t s = 0; s < grid.size(); ++s) lap[s] += scratch[s];
        }
        for (std::size_t s = 0; s < grid.size(); ++s) {
            const double psi_tt =
                (frames[k + 1].v[s] - 2.0 * frames[k].v[s] + frames[k - 1].v[s]) * inv_c2dt2;
            double r = psi_tt - lap[s];
            if (kappa2 != 0.0) r += kappa2 * frames[k].v[s];
            worst = std::max(worst, std::abs(r));
        }
    }
    return worst;
}

double five_relations_residual(const KgSpatialFields& fields, const ScalarField& psi,
                               const ScalarField& psidot, const PhysicalConstants& pc) {
    const Lattice& grid = fields.rho.lat;
    if (psi.lat != grid || psidot.lat != grid)
        throw ConfigError("amplitude fields and deposits live on different grids");
    const int n = grid.dim();
    const double c = pc.c;
    const double mc_hbar = pc.mc_over_hbar();

    double worst = 0.0;
    for (std::size_t s = 0; s < grid.size(); ++s)
        worst = std::max(worst, std::abs(fields.rho.v[s] * c - psidot.v[s] / c));
    std::vector<double> grad(grid.size());
    for (int r = 0; r < n; ++r) {
        fd_gradient(grid, psi.v, r, grad);
        const auto& mom = fields.mom.comp[static_cast<std::size_t>(r)];
        for (std::size_t s = 0; s < grid.size(); ++s)
            worst = std::max(worst, std::abs(-mom[s] - grad[s]));
    }
    for (std::size_t s = 0; s < grid.size(); ++s)
        worst = std::max(worst, std::abs(fields.mom4.v[s] - mc_hbar * psi.v[s]));
    return worst;
}

} // namespace kgc
