#pragma once

#include <cstdlib>
#include <span>
#include <vector>

#include "kgc/errors.hpp"

namespace kgc {

// Diagonal flat metric g_ij = zeta_i delta_ij with zeta_i = +-1.  Index
// raising and lowering are sign flips, so both are exact (bitwise involutive)
// in floating point.
class MetricSignature {
public:
    MetricSignature() = default;

    explicit MetricSignature(std::vector<int> zeta) : zeta_(std::move(zeta)) {
        if (zeta_.empty() || zeta_.size() > 4)
            throw ConfigError("metric signature supports 1..4 dimensions");
        for (int z : zeta_)
            if (z != 1 && z != -1)
                throw ConfigError("metric signature entries must be +1 or -1");
    }

    // All-minus spatial signature, the one every shipped run uses.
    static MetricSignature spatial(int n) {
        return MetricSignature(std::vector<int>(static_cast<std::size_t>(n), -1));
    }

    // diag(-1,-1,-1,+1): the 4-space signature of the massive reduction.
    static MetricSignature kg4() { return MetricSignature({-1, -1, -1, 1}); }

    int dim() const { return static_cast<int>(zeta_.size()); }
    int zeta(int i) const { return zeta_[static_cast<std::size_t>(i)]; }
    double g(int i, int j) const { return i == j ? static_cast<double>(zeta(i)) : 0.0; }

    double lower(int i, double v_upper) const { return zeta(i) == 1 ? v_upper : -v_upper; }
    double raise(int i, double v_lower) const { return zeta(i) == 1 ? v_lower : -v_lower; }

    bool operator==(const MetricSignature&) const = default;

private:
    std::vector<int> zeta_;
};

} // namespace kgc
