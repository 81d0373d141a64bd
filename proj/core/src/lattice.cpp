#include "kgc/lattice.hpp"

#include <algorithm>
#include <limits>

namespace kgc {

Lattice::Lattice(std::vector<int> counts, std::vector<double> box, std::vector<double> origin)
    : counts_(std::move(counts)), box_(std::move(box)), origin_(std::move(origin)) {
    dim_ = static_cast<int>(counts_.size());
    if (dim_ < 1 || dim_ > max_dim)
        throw ConfigError("lattice dimension must be 1..3, got " + std::to_string(dim_));
    if (box_.size() != counts_.size())
        throw ConfigError("lattice box extent list must match the axis count");
    if (origin_.empty())
        origin_.assign(static_cast<std::size_t>(dim_), 0.0);
    if (origin_.size() != counts_.size())
        throw ConfigError("lattice origin list must match the axis count");

    size_ = 1;
    spacing_.resize(static_cast<std::size_t>(dim_));
    strides_.resize(static_cast<std::size_t>(dim_));
    for (int ax = 0; ax < dim_; ++ax) {
        auto a = static_cast<std::size_t>(ax);
        if (counts_[a] < 4)
            throw ConfigError("lattice needs at least 4 sites per axis for the stencils");
        if (!(box_[a] > 0.0))
            throw ConfigError("lattice box extents must be positive");
        strides_[a] = size_;
        size_ *= static_cast<std::size_t>(counts_[a]);
        spacing_[a] = box_[a] / static_cast<double>(counts_[a]);
    }
}

double Lattice::min_spacing() const {
    return *std::min_element(spacing_.begin(), spacing_.end());
}

double Lattice::cell_volume() const {
    double v = 1.0;
    for (double s : spacing_) v *= s;
    return v;
}

std::size_t Lattice::site(std::span<const int> idx) const {
    std::size_t s = 0;
    for (int ax = dim_ - 1; ax >= 0; --ax) {
        auto a = static_cast<std::size_t>(ax);
        s = s * static_cast<std::size_t>(counts_[a]) + static_cast<std::size_t>(idx[a]);
    }
    return s;
}

void Lattice::unravel(std::size_t site, std::span<int> idx) const {
    for (int ax = 0; ax < dim_; ++ax) {
        auto a = static_cast<std::size_t>(ax);
        auto n = static_cast<std::size_t>(counts_[a]);
        idx[a] = static_cast<int>(site % n);
        site /= n;
    }
}

std::vector<double> Lattice::position(std::size_t site) const {
    std::vector<double> out(static_cast<std::size_t>(dim_));
    position(site, out);
    return out;
}

void Lattice::position(std::size_t site, std::span<double> out) const {
    std::array<int, max_dim> idx{};
    unravel(site, std::span<int>(idx.data(), static_cast<std::size_t>(dim_)));
    for (int ax = 0; ax < dim_; ++ax)
        out[static_cast<std::size_t>(ax)] = coordinate(idx[static_cast<std::size_t>(ax)], ax);
}

std::size_t Lattice::neighbor(std::size_t site, int axis, int step) const {
    auto a = static_cast<std::size_t>(axis);
    auto n = static_cast<long long>(counts_[a]);
    auto stride = strides_[a];
    auto i = static_cast<long long>((site / stride) % static_cast<std::size_t>(n));
    long long j = (i + step) % n;
    if (j < 0) j += n;
    return site + (static_cast<std::size_t>(j) - static_cast<std::size_t>(i)) * stride;
}

double Lattice::fold(double x, int axis) const {
    const double lo = origin(axis);
    const double len = extent(axis);
    double y = x - lo;
    y -= std::floor(y / len) * len;
    // Guard against y == len from rounding when x sits a hair below lo.
    if (y >= len) y -= len;
    if (y < 0.0) y = 0.0;
    return lo + y;
}

} // namespace kgc
