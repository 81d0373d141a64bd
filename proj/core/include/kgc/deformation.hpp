#pragma once

#include "kgc/congruence.hpp"

namespace kgc {

// Per-site deformation data of the material map a -> q(a,t):
//   D[i][j]   = dq^i/da^j
//   J         = det D
//   adj       = classical adjugate, D * adj = J * Identity
// The operator dq^i/da^j is differenced on the periodic displacement
// q - a, then the identity is added back, so uniform drifts of the whole
// congruence do not corrupt the wrap columns.
struct DeformationData {
    int n = 0;
    std::size_t sites = 0;
    std::vector<double> D;    // site-major, row-major n*n blocks
    std::vector<double> adj;  // same layout
    std::vector<double> J;

    double d(std::size_t s, int i, int j) const {
        return D[(s * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)) *
                     static_cast<std::size_t>(n) +
                 static_cast<std::size_t>(j)];
    }
    double a(std::size_t s, int i, int j) const {
        return adj[(s * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)) *
                       static_cast<std::size_t>(n) +
                   static_cast<std::size_t>(j)];
    }
};

// Computes deformation data for a position field on its label lattice.
// Throws JacobianCollapse at the first site with J <= jacobian_floor.
DeformationData deformation(const VectorField& q, double time, double jacobian_floor);

inline DeformationData deformation(const CongruenceState& s, double jacobian_floor) {
    return deformation(s.q, s.t, jacobian_floor);
}
inline DeformationData deformation(const KgCongruenceState& s, double jacobian_floor) {
    return deformation(s.q, s.t, jacobian_floor);
}

// Material-picture spatial derivative of a label field:
//   df/dq^i = J^-1 adj[j][i] df/da^j   (sum over j)
// Output carries a lower index.
VectorField material_spatial_derivative(const ScalarField& f, const DeformationData& def);

} // namespace kgc
