#pragma once

#include <cstddef>
#include <vector>

#include "kgc/lattice.hpp"
#include "kgc/metric.hpp"

namespace kgc {

// A scalar sampled at every lattice site, in canonical site order.
struct ScalarField {
    Lattice lat;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const Lattice& lattice, double fill = 0.0)
        : lat(lattice), v(lattice.size(), fill) {}

    std::size_t size() const { return v.size(); }
    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }
};

enum class Variance { upper, lower };

// Per-site vector quantity, stored one contiguous block per component.
// The variance tag records whether components carry upper or lower indices;
// raising/lowering against the diagonal metric is a per-component sign flip.
struct VectorField {
    Lattice lat;
    Variance var = Variance::upper;
    std::vector<std::vector<double>> comp;

    VectorField() = default;
    VectorField(const Lattice& lattice, int ncomp, Variance variance = Variance::upper)
        : lat(lattice), var(variance),
          comp(static_cast<std::size_t>(ncomp), std::vector<double>(lattice.size(), 0.0)) {}

    int ncomp() const { return static_cast<int>(comp.size()); }
    std::vector<double>& operator[](std::size_t c) { return comp[c]; }
    const std::vector<double>& operator[](std::size_t c) const { return comp[c]; }
};

// Flips index position against a diagonal +-1 metric.  Exact: multiplication
// by -1 only touches the sign bit, so raise(lower(x)) == x bitwise.
inline VectorField flip_variance(const VectorField& f, const MetricSignature& sig) {
    VectorField out = f;
    out.var = (f.var == Variance::upper) ? Variance::lower : Variance::upper;
    for (int c = 0; c < f.ncomp(); ++c) {
        if (sig.zeta(c) == -1) {
            for (double& x : out.comp[static_cast<std::size_t>(c)]) x = -x;
        }
    }
    return out;
}

} // namespace kgc
