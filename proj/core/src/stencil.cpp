#include "kgc/stencil.hpp"

namespace kgc {

namespace {

// Walks the lattice as (lines along `axis`) x (everything else) so the wrap
// arithmetic happens once per line, not once per site.
template <class LineOp>
void for_each_line(const Lattice& lat, int axis, LineOp&& op) {
    const std::size_t stride = lat.stride(axis);
    const auto n = static_cast<std::size_t>(lat.count(axis));
    const std::size_t total = lat.size();
    const std::size_t line_block = stride * n;
    for (std::size_t block = 0; block < total; block += line_block)
        for (std::size_t lo = 0; lo < stride; ++lo)
            op(block + lo, stride, n);
}

} // namespace

void fd_gradient(const Lattice& lat, const std::vector<double>& f, int axis,
                 std::vector<double>& out) {
    out.resize(lat.size());
    const double inv2h = 1.0 / (2.0 * lat.spacing(axis));
    for_each_line(lat, axis, [&](std::size_t base, std::size_t stride, std::size_t n) {
        const std::size_t last = stride * (n - 1);
        out[base] = (f[base + stride] - f[base + last]) * inv2h;
        for (std::size_t i = 1; i + 1 < n; ++i)
            out[base + i * stride] =
                (f[base + (i + 1) * stride] - f[base + (i - 1) * stride]) * inv2h;
        out[base + last] = (f[base] - f[base + last - stride]) * inv2h;
    });
}

ScalarField fd_gradient(const ScalarField& f, int axis) {
    ScalarField out(f.lat);
    fd_gradient(f.lat, f.v, axis, out.v);
    return out;
}

void fd_second(const Lattice& lat, const std::vector<double>& f, int axis,
               std::vector<double>& out) {
    out.resize(lat.size());
    const double h = lat.spacing(axis);
    const double invh2 = 1.0 / (h * h);
    for_each_line(lat, axis, [&](std::size_t base, std::size_t stride, std::size_t n) {
        const std::size_t last = stride * (n - 1);
        out[base] = (f[base + stride] - 2.0 * f[base] + f[base + last]) * invh2;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const std::size_t s = base + i * stride;
            out[s] = (f[s + stride] - 2.0 * f[s] + f[s - stride]) * invh2;
        }
        out[base + last] =
            (f[base] - 2.0 * f[base + last] + f[base + last - stride]) * invh2;
    });
}

ScalarField fd_second(const ScalarField& f, int axis) {
    ScalarField out(f.lat);
    fd_second(f.lat, f.v, axis, out.v);
    return out;
}

} // namespace kgc
