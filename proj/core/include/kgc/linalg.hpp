#pragma once

#include <cstddef>

namespace kgc {

// Determinant and classical adjugate of a small row-major n x n matrix,
// n in {1,2,3}, closed-form cofactor expansion.  The adjugate satisfies
// M * adj(M) = det(M) * I; for n = 1 the adjugate is [1].
double det_adjugate(int n, const double* m, double* adj);

double det_small(int n, const double* m);

} // namespace kgc
