#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "kgc/errors.hpp"

namespace kgc {

// Uniform periodic lattice.  Serves both as the label lattice (initial
// positions a^i) and as the spatial deposit grid; the two roles share shape
// and site ordering.
//
// Canonical site ordering: axis 1 varies fastest, i.e.
//   site = i1 + N1*(i2 + N2*i3)
// This ordering is the serialization contract as well.
class Lattice {
public:
    static constexpr int max_dim = 3;

    Lattice() = default;

    Lattice(std::vector<int> counts, std::vector<double> box, std::vector<double> origin = {});

    int dim() const { return dim_; }
    std::size_t size() const { return size_; }

    int count(int axis) const { return counts_[static_cast<std::size_t>(axis)]; }
    double extent(int axis) const { return box_[static_cast<std::size_t>(axis)]; }
    double origin(int axis) const { return origin_[static_cast<std::size_t>(axis)]; }
    double spacing(int axis) const { return spacing_[static_cast<std::size_t>(axis)]; }

    const std::vector<int>& counts() const { return counts_; }
    const std::vector<double>& box() const { return box_; }
    const std::vector<double>& origins() const { return origin_; }

    double min_spacing() const;
    double cell_volume() const;

    std::size_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }

    std::size_t site(std::span<const int> idx) const;
    void unravel(std::size_t site, std::span<int> idx) const;

    // Coordinate of a site along one axis: origin + i*spacing.
    double coordinate(int index, int axis) const {
        return origin(axis) + static_cast<double>(index) * spacing(axis);
    }
    std::vector<double> position(std::size_t site) const;
    void position(std::size_t site, std::span<double> out) const;

    // Periodic neighbor of a site along an axis (step = +-1 or any integer).
    std::size_t neighbor(std::size_t site, int axis, int step) const;

    // Folds a coordinate into [origin, origin + extent).
    double fold(double x, int axis) const;

    bool operator==(const Lattice&) const = default;

private:
    int dim_ = 0;
    std::size_t size_ = 0;
    std::vector<int> counts_;
    std::vector<double> box_;
    std::vector<double> origin_;
    std::vector<double> spacing_;
    std::vector<std::size_t> strides_;
};

} // namespace kgc
