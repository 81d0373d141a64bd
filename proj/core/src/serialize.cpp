#include "kgc/serialize.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <ostream>

#include "kgc/errors.hpp"

namespace kgc {

namespace {

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream os(path, mode);
    if (!os) throw ConfigError("cannot open output file: " + path);
    return os;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream is(path, mode);
    if (!is) throw ConfigError("cannot open input file: " + path);
    return is;
}

void put_u32(std::ostream& os, std::uint32_t x) {
    const char b[4] = {static_cast<char>(x & 0xff), static_cast<char>((x >> 8) & 0xff),
                       static_cast<char>((x >> 16) & 0xff), static_cast<char>((x >> 24) & 0xff)};
    os.write(b, 4);
}

void put_f64(std::ostream& os, double x) {
    const auto u = std::bit_cast<std::uint64_t>(x);
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((u >> (8 * i)) & 0xff);
    os.write(b, 8);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw ConfigError("truncated binary field block");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

double get_f64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw ConfigError("truncated binary field block");
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(u);
}

void write_header(std::ostream& os, const Lattice& lat, const std::string& name,
                  const std::string& units, const std::string& value_cols) {
    os << "# " << name << ": site_index";
    for (int i = 0; i < lat.dim(); ++i) os << ", a_" << (i + 1);
    os << ", " << value_cols << " (" << units << ")\n";
}

void write_rows(std::ostream& os, const Lattice& lat,
                const std::vector<const std::vector<double>*>& cols) {
    std::array<double, Lattice::max_dim> x{};
    const std::span<double> xs(x.data(), static_cast<std::size_t>(lat.dim()));
    for (std::size_t s = 0; s < lat.size(); ++s) {
        lat.position(s, xs);
        os << s;
        for (int i = 0; i < lat.dim(); ++i) os << ", " << format_double(x[static_cast<std::size_t>(i)]);
        for (const auto* col : cols) os << ", " << format_double((*col)[s]);
        os << "\n";
    }
}

} // namespace

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

void write_field_text(std::ostream& os, const ScalarField& f, const std::string& name,
                      const std::string& units) {
    write_header(os, f.lat, name, units, "value");
    write_rows(os, f.lat, {&f.v});
}

void write_field_text(std::ostream& os, const VectorField& f, const std::string& name,
                      const std::string& units) {
    std::string cols;
    for (int i = 0; i < f.ncomp(); ++i) {
        if (i) cols += ", ";
        cols += "value_" + std::to_string(i + 1);
    }
    write_header(os, f.lat, name, units, cols);
    std::vector<const std::vector<double>*> ptrs;
    for (const auto& c : f.comp) ptrs.push_back(&c);
    write_rows(os, f.lat, ptrs);
}

void write_field_text(const std::string& path, const ScalarField& f, const std::string& name,
                      const std::string& units) {
    auto os = open_out(path);
    write_field_text(os, f, name, units);
}

void write_field_text(const std::string& path, const VectorField& f, const std::string& name,
                      const std::string& units) {
    auto os = open_out(path);
    write_field_text(os, f, name, units);
}

void write_field_binary(std::ostream& os, const ScalarField& f) {
    os.write(binary_magic.data(), binary_magic.size());
    const int n = f.lat.dim();
    put_u32(os, static_cast<std::uint32_t>(n));
    for (int i = 0; i < n; ++i) put_u32(os, static_cast<std::uint32_t>(f.lat.count(i)));
    for (int i = 0; i < n; ++i) put_f64(os, f.lat.extent(i));
    for (double x : f.v) put_f64(os, x);
}

void write_field_binary(const std::string& path, const ScalarField& f) {
    auto os = open_out(path, std::ios::binary);
    write_field_binary(os, f);
}

ScalarField read_field_binary(std::istream& is) {
    std::array<char, 16> magic{};
    is.read(magic.data(), magic.size());
    if (!is || magic != binary_magic) throw ConfigError("bad magic in binary field block");
    const auto n = get_u32(is);
    if (n < 1 || n > static_cast<std::uint32_t>(Lattice::max_dim))
        throw ConfigError("unsupported dimension in binary field block");
    std::vector<int> counts(n);
    std::vector<double> box(n);
    for (auto& c : counts) c = static_cast<int>(get_u32(is));
    for (auto& b : box) b = get_f64(is);
    ScalarField f((Lattice(counts, box)));
    for (auto& x : f.v) x = get_f64(is);
    return f;
}

ScalarField read_field_binary(const std::string& path) {
    auto is = open_in(path, std::ios::binary);
    return read_field_binary(is);
}

void write_residual_series(std::ostream& os, const std::vector<ResidualSample>& rows) {
    os << "t, residual_name, value\n";
    for (const auto& r : rows)
        os << format_double(r.t) << ", " << r.name << ", " << format_double(r.value) << "\n";
}

void write_residual_series(const std::string& path, const std::vector<ResidualSample>& rows) {
    auto os = open_out(path);
    write_residual_series(os, rows);
}

void write_trajectories(std::ostream& os, const std::vector<TrajectorySample>& rows, int d) {
    os << "label_index, t";
    for (int i = 0; i < d; ++i) os << ", q_" << (i + 1);
    os << ", tau, T\n";
    for (const auto& r : rows) {
        os << r.label << ", " << format_double(r.t);
        for (int i = 0; i < d; ++i) os << ", " << format_double(r.q[static_cast<std::size_t>(i)]);
        os << ", " << format_double(r.tau) << ", " << format_double(r.clock) << "\n";
    }
}

void write_trajectories(const std::string& path, const std::vector<TrajectorySample>& rows,
                        int d) {
    auto os = open_out(path);
    write_trajectories(os, rows, d);
}

void write_covariance_report(std::ostream& os, const std::vector<CovarianceRow>& rows) {
    os << "u, residual_eq34, residual_eq21, exponent, verdict\n";
    for (const auto& r : rows) {
        os << format_double(r.u) << ", " << format_double(r.motion_residual) << ", "
           << format_double(r.density_residual) << ", ";
        if (r.has_exponent)
            os << format_double(r.exponent);
        else
            os << "-";
        os << ", " << r.verdict << "\n";
    }
}

void write_covariance_report(const std::string& path, const std::vector<CovarianceRow>& rows) {
    auto os = open_out(path);
    write_covariance_report(os, rows);
}

} // namespace kgc
