#include "kgc/linalg.hpp"

namespace kgc {

double det_adjugate(int n, const double* m, double* adj) {
    switch (n) {
    case 1:
        adj[0] = 1.0;
        return m[0];
    case 2:
        adj[0] = m[3];
        adj[1] = -m[1];
        adj[2] = -m[2];
        adj[3] = m[0];
        return m[0] * m[3] - m[1] * m[2];
    case 3: {
        const double a = m[0], b = m[1], c = m[2];
        const double d = m[3], e = m[4], f = m[5];
        const double g = m[6], h = m[7], i = m[8];
        adj[0] = e * i - f * h;
        adj[1] = c * h - b * i;
        adj[2] = b * f - c * e;
        adj[3] = f * g - d * i;
        adj[4] = a * i - c * g;
        adj[5] = c * d - a * f;
        adj[6] = d * h - e * g;
        adj[7] = b * g - a * h;
        adj[8] = a * e - b * d;
        return a * adj[0] + b * adj[3] + c * adj[6];
    }
    default:
        break;
    }
    return 0.0;
}

double det_small(int n, const double* m) {
    double scratch[9];
    return det_adjugate(n, m, scratch);
}

} // namespace kgc
