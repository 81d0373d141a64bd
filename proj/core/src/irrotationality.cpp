#include <cmath>

#include "kgc/dynamics.hpp"
#include "kgc/stencil.hpp"

namespace kgc {

VectorField irrotationality_residual(const CongruenceState& s, const MetricSignature& sig,
                                     const ScalarField& phi, double jacobian_floor) {
    const Lattice& lat = s.lattice();
    const int n = s.dim();
    const std::size_t sites = lat.size();
    if (phi.lat != lat) throw ConfigError("pulled-back amplitude is not on the label lattice");

    const DeformationData def = deformation(s, jacobian_floor);
    VectorField res(lat, n, Variance::lower);
    std::vector<double> grad(sites);
    for (int i = 0; i < n; ++i) {
        fd_gradient(lat, phi.v, i, grad);
        auto& out = res.comp[static_cast<std::size_t>(i)];
        for (std::size_t si = 0; si < sites; ++si) {
            double mom = 0.0;
            for (int j = 0; j < n; ++j)
                mom += sig.zeta(j) * s.qdot.comp[static_cast<std::size_t>(j)][si] *
                       def.d(si, j, i);
            out[si] = s.rho0.v[si] / def.J[si] * mom - grad[si];
        }
    }
    return res;
}

KgIrrotationality kg_irrotationality_residual(const KgCongruenceState& s,
                                              const ScalarField& psi_at_q,
                                              const PhysicalConstants& pc,
                                              double jacobian_floor) {
    const Lattice& lat = s.lattice();
    const int n = s.dim();
    const std::size_t sites = lat.size();
    if (psi_at_q.lat != lat) throw ConfigError("pulled-back amplitude is not on the label lattice");

    const DeformationData def = deformation(s, jacobian_floor);
    const double c2 = pc.c * pc.c;
    const double kappa = pc.kappa();
    const double m_over_hbar = pc.mass / pc.hbar;

    ScalarField phi(lat);
    for (std::size_t si = 0; si < sites; ++si)
        phi.v[si] = psi_at_q.v[si] * std::exp(kappa * s.tau.v[si]);

    KgIrrotationality res;
    res.spatial = VectorField(lat, n, Variance::lower);
    res.clock = ScalarField(lat);

    std::vector<double> grad_tau(sites);
    std::vector<double> grad_phi(sites);
    for (int r = 0; r < n; ++r) {
        fd_gradient(lat, s.tau.v, r, grad_tau);
        fd_gradient(lat, phi.v, r, grad_phi);
        auto& out = res.spatial.comp[static_cast<std::size_t>(r)];
        for (std::size_t si = 0; si < sites; ++si) {
            double mom = c2 * s.taudot.v[si] * grad_tau[si];
            for (int j = 0; j < n; ++j)
                mom -= s.qdot.comp[static_cast<std::size_t>(j)][si] * def.d(si, j, r);
            out[si] = s.rho0.v[si] / def.J[si] * mom - grad_phi[si];
        }
    }
    for (std::size_t si = 0; si < sites; ++si)
        res.clock.v[si] = s.rho0.v[si] / def.J[si] * s.taudot.v[si] - m_over_hbar * phi.v[si];
    return res;
}

} // namespace kgc
