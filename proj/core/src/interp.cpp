#include "kgc/interp.hpp"

#include <array>
#include <cmath>

namespace kgc {

ScalarField sample(const std::function<double(std::span<const double>)>& fn,
                   const Lattice& lat) {
    ScalarField out(lat);
    std::array<double, Lattice::max_dim> x{};
    std::span<double> xs(x.data(), static_cast<std::size_t>(lat.dim()));
    for (std::size_t s = 0; s < lat.size(); ++s) {
        lat.position(s, xs);
        out.v[s] = fn(xs);
    }
    return out;
}

double interpolate(const Lattice& lat, const std::vector<double>& values,
                   std::span<const double> point) {
    const int n = lat.dim();
    std::array<int, Lattice::max_dim> base{};
    std::array<double, Lattice::max_dim> frac{};
    bool on_node = true;
    for (int ax = 0; ax < n; ++ax) {
        const double folded = lat.fold(point[static_cast<std::size_t>(ax)], ax);
        const double s = (folded - lat.origin(ax)) / lat.spacing(ax);
        double fl = std::floor(s);
        double f = s - fl;
        int i = static_cast<int>(fl);
        if (i >= lat.count(ax)) { // fold() guarantees s < count up to rounding
            i = 0;
            f = 0.0;
        }
        base[static_cast<std::size_t>(ax)] = i;
        frac[static_cast<std::size_t>(ax)] = f;
        if (f != 0.0) on_node = false;
    }

    std::array<int, Lattice::max_dim> idx{};
    for (int ax = 0; ax < n; ++ax) idx[static_cast<std::size_t>(ax)] = base[static_cast<std::size_t>(ax)];
    const std::size_t base_site = lat.site(std::span<const int>(idx.data(), static_cast<std::size_t>(n)));
    if (on_node) return values[base_site];

    double acc = 0.0;
    const int corners = 1 << n;
    for (int c = 0; c < corners; ++c) {
        double w = 1.0;
        std::size_t site = base_site;
        for (int ax = 0; ax < n; ++ax) {
            if (c & (1 << ax)) {
                w *= frac[static_cast<std::size_t>(ax)];
                site = lat.neighbor(site, ax, 1);
            } else {
                w *= 1.0 - frac[static_cast<std::size_t>(ax)];
            }
        }
        acc += w * values[site];
    }
    return acc;
}

double interpolate(const ScalarField& f, std::span<const double> point) {
    return interpolate(f.lat, f.v, point);
}

} // namespace kgc
