#pragma once

#include "kgc/field.hpp"

namespace kgc {

// Second-order central difference along one axis with periodic wrap:
//   (f[i+1] - f[i-1]) / (2 da)
// One global accuracy order keeps every convergence diagnostic interpretable,
// so this is the only first-derivative stencil in the library.
ScalarField fd_gradient(const ScalarField& f, int axis);

// Same stencil applied to a raw value array living on `lat`.
void fd_gradient(const Lattice& lat, const std::vector<double>& f, int axis,
                 std::vector<double>& out);

// Periodic central second difference along one axis:
//   (f[i+1] - 2 f[i] + f[i-1]) / da^2
ScalarField fd_second(const ScalarField& f, int axis);
void fd_second(const Lattice& lat, const std::vector<double>& f, int axis,
               std::vector<double>& out);

} // namespace kgc
