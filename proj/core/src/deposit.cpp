#include "kgc/deposit.hpp"

#include <array>
#include <cmath>

#include "kgc/errors.hpp"

namespace kgc {

namespace {

struct CellAnchor {
    std::array<int, Lattice::max_dim> base{};
    std::array<double, Lattice::max_dim> frac{};
};

CellAnchor anchor(const Lattice& grid, const VectorField& pos, std::size_t label) {
    CellAnchor a;
    for (int i = 0; i < grid.dim(); ++i) {
        const double x = grid.fold(pos.comp[static_cast<std::size_t>(i)][label], i);
        const double fi = (x - grid.origin(i)) / grid.spacing(i);
        double ip = 0.0;
        double fr = std::modf(fi, &ip);
        int idx = static_cast<int>(ip);
        // fold() keeps x in [origin, origin + extent), but rounding in the
        // division can still push fi to the count boundary.
        if (idx >= grid.count(i)) {
            idx -= grid.count(i);
        } else if (idx < 0) {
            idx += grid.count(i);
            fr += 1.0;
            if (fr >= 1.0) {
                fr -= 1.0;
                ++idx;
            }
        }
        a.base[static_cast<std::size_t>(i)] = idx;
        a.frac[static_cast<std::size_t>(i)] = fr;
    }
    return a;
}

} // namespace

void scatter(const Lattice& grid, DepositKernel kernel, const VectorField& positions,
             const std::vector<double>& charges, std::vector<double>& accum) {
    const int n = grid.dim();
    if (positions.ncomp() != n)
        throw ConfigError("position component count does not match the deposit grid");
    if (charges.size() != positions.lat.size())
        throw ConfigError("charge count does not match the label lattice");
    accum.resize(grid.size(), 0.0);
    const double inv_vol = 1.0 / grid.cell_volume();

    std::array<int, Lattice::max_dim> idx{};
    for (std::size_t label = 0; label < charges.size(); ++label) {
        const CellAnchor a = anchor(grid, positions, label);
        const double q = charges[label] * inv_vol;
        if (kernel == DepositKernel::nearest) {
            for (int i = 0; i < n; ++i) {
                const auto ii = static_cast<std::size_t>(i);
                idx[ii] = a.base[ii] + (a.frac[ii] >= 0.5 ? 1 : 0);
                if (idx[ii] == grid.count(i)) idx[ii] = 0;
            }
            accum[grid.site(std::span<const int>(idx.data(), static_cast<std::size_t>(n)))] += q;
        } else {
            const unsigned corners = 1u << n;
            for (unsigned corner = 0; corner < corners; ++corner) {
                double w = 1.0;
                for (int i = 0; i < n; ++i) {
                    const auto ii = static_cast<std::size_t>(i);
                    const bool hi = (corner >> i) & 1u;
                    w *= hi ? a.frac[ii] : 1.0 - a.frac[ii];
                    idx[ii] = a.base[ii] + (hi ? 1 : 0);
                    if (idx[ii] == grid.count(i)) idx[ii] = 0;
                }
                accum[grid.site(std::span<const int>(idx.data(), static_cast<std::size_t>(n)))] +=
                    q * w;
            }
        }
    }
}

namespace {

void mask_and_divide(const ScalarField& rho, const VectorField& mom, const ScalarField* mom4,
                     double rho_floor, VectorField& v, ScalarField* v4,
                     std::vector<std::uint8_t>& valid) {
    const std::size_t sites = rho.size();
    double peak = 0.0;
    for (double x : rho.v) peak = std::max(peak, std::abs(x));
    const double floor = rho_floor * peak;
    valid.assign(sites, 0);
    for (std::size_t s = 0; s < sites; ++s) {
        if (std::abs(rho.v[s]) >= floor && rho.v[s] != 0.0) {
            valid[s] = 1;
            for (int i = 0; i < mom.ncomp(); ++i)
                v.comp[static_cast<std::size_t>(i)][s] =
                    mom.comp[static_cast<std::size_t>(i)][s] / rho.v[s];
            if (mom4) v4->v[s] = mom4->v[s] / rho.v[s];
        }
    }
}

} // namespace

SpatialFields deposit(const CongruenceState& s, const Lattice& grid, DepositKernel kernel,
                      double rho_floor) {
    const Lattice& labels = s.lattice();
    const int n = s.dim();
    if (grid.dim() != n) throw ConfigError("deposit grid dimension does not match the state");

    SpatialFields out;
    out.t = s.t;
    out.rho = ScalarField(grid);
    out.mom = VectorField(grid, n, Variance::upper);
    out.v = VectorField(grid, n, Variance::upper);

    const double dvol = labels.cell_volume();
    std::vector<double> charge(labels.size());
    for (std::size_t l = 0; l < labels.size(); ++l) charge[l] = s.rho0.v[l] * dvol;
    scatter(grid, kernel, s.q, charge, out.rho.v);
    for (int i = 0; i < n; ++i) {
        for (std::size_t l = 0; l < labels.size(); ++l)
            charge[l] = s.rho0.v[l] * s.qdot.comp[static_cast<std::size_t>(i)][l] * dvol;
        scatter(grid, kernel, s.q, charge, out.mom.comp[static_cast<std::size_t>(i)]);
    }
    mask_and_divide(out.rho, out.mom, nullptr, rho_floor, out.v, nullptr, out.valid);
    return out;
}

KgSpatialFields kg_deposit(const KgCongruenceState& s, const PhysicalConstants& pc,
                           const Lattice& grid, DepositKernel kernel, double rho_floor) {
    const Lattice& labels = s.lattice();
    const int n = s.dim();
    if (grid.dim() != n) throw ConfigError("deposit grid dimension does not match the state");

    KgSpatialFields out;
    out.t = s.t;
    out.rho = ScalarField(grid);
    out.mom = VectorField(grid, n, Variance::upper);
    out.mom4 = ScalarField(grid);
    out.v = VectorField(grid, n, Variance::upper);
    out.v4 = ScalarField(grid);

    const double dvol = labels.cell_volume();
    const double kappa = pc.kappa();

    // Deposited charge carries the clock attenuation exp(-tau/alpha); the
    // label-side charge is therefore time-dependent by design.
    std::vector<double> base(labels.size());
    for (std::size_t l = 0; l < labels.size(); ++l)
        base[l] = s.rho0.v[l] * std::exp(-kappa * s.tau.v[l]) * dvol;

    std::vector<double> charge(labels.size());
    scatter(grid, kernel, s.q, base, out.rho.v);
    for (int i = 0; i < n; ++i) {
        for (std::size_t l = 0; l < labels.size(); ++l)
            charge[l] = base[l] * s.qdot.comp[static_cast<std::size_t>(i)][l];
        scatter(grid, kernel, s.q, charge, out.mom.comp[static_cast<std::size_t>(i)]);
    }
    for (std::size_t l = 0; l < labels.size(); ++l)
        charge[l] = base[l] * pc.c * s.taudot.v[l];
    scatter(grid, kernel, s.q, charge, out.mom4.v);

    mask_and_divide(out.rho, out.mom, &out.mom4, rho_floor, out.v, &out.v4, out.valid);
    return out;
}

double total_charge(const ScalarField& rho) {
    double sum = 0.0;
    for (double x : rho.v) sum += x;
    return sum * rho.lat.cell_volume();
}

} // namespace kgc
