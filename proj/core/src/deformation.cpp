#include "kgc/deformation.hpp"

#include <array>

#include "kgc/linalg.hpp"
#include "kgc/stencil.hpp"

namespace kgc {

DeformationData deformation(const VectorField& q, double time, double jacobian_floor) {
    const Lattice& lat = q.lat;
    const int n = q.ncomp();
    if (n != lat.dim())
        throw ConfigError("position field component count does not match the label lattice");
    const std::size_t sites = lat.size();

    DeformationData def;
    def.n = n;
    def.sites = sites;
    def.D.resize(sites * static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    def.adj.resize(def.D.size());
    def.J.resize(sites);

    // Gradient of the periodic displacement u^i = q^i - a^i, one axis at a
    // time, written straight into the D blocks.
    std::vector<double> disp(sites);
    std::vector<double> grad(sites);
    for (int i = 0; i < n; ++i) {
        std::array<int, Lattice::max_dim> idx{};
        for (std::size_t s = 0; s < sites; ++s) {
            lat.unravel(s, std::span<int>(idx.data(), static_cast<std::size_t>(lat.dim())));
            disp[s] = q.comp[static_cast<std::size_t>(i)][s] -
                      lat.coordinate(idx[static_cast<std::size_t>(i)], i);
        }
        for (int j = 0; j < n; ++j) {
            fd_gradient(lat, disp, j, grad);
            const double kron = (i == j) ? 1.0 : 0.0;
            for (std::size_t s = 0; s < sites; ++s) {
                def.D[(s * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)) *
                          static_cast<std::size_t>(n) +
                      static_cast<std::size_t>(j)] = kron + grad[s];
            }
        }
    }

    const std::size_t nn = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    for (std::size_t s = 0; s < sites; ++s) {
        def.J[s] = det_adjugate(n, def.D.data() + s * nn, def.adj.data() + s * nn);
        if (!(def.J[s] > jacobian_floor))
            throw JacobianCollapse(s, time, def.J[s]);
    }
    return def;
}

VectorField material_spatial_derivative(const ScalarField& f, const DeformationData& def) {
    const Lattice& lat = f.lat;
    const int n = def.n;
    VectorField out(lat, n, Variance::lower);

    std::vector<std::vector<double>> grads(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) fd_gradient(lat, f.v, j, grads[static_cast<std::size_t>(j)]);

    for (std::size_t s = 0; s < lat.size(); ++s) {
        const double inv_j = 1.0 / def.J[s];
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j)
                acc += def.a(s, j, i) * grads[static_cast<std::size_t>(j)][s];
            out.comp[static_cast<std::size_t>(i)][s] = inv_j * acc;
        }
    }
    return out;
}

} // namespace kgc
