#pragma once

#include <functional>
#include <span>

#include "kgc/field.hpp"

namespace kgc {

// Evaluates fn at every site position, canonical site order.
ScalarField sample(const std::function<double(std::span<const double>)>& fn,
                   const Lattice& lat);

// Multilinear periodic interpolation.  Points are folded into the box first.
// Exact whole-node hits short-circuit to the stored value, keeping identity
// transformations bitwise.
double interpolate(const ScalarField& f, std::span<const double> point);

// Same, reading one component array of a vector field.
double interpolate(const Lattice& lat, const std::vector<double>& values,
                   std::span<const double> point);

} // namespace kgc
