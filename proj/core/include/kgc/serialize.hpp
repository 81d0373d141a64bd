#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kgc/field.hpp"

namespace kgc {

// Plain-text field dump: one row per site, `site_index, a_1..a_n, value...`,
// preceded by a `#` header naming the columns and units.  Values use 17
// significant digits so text dumps round-trip doubles exactly.
void write_field_text(std::ostream& os, const ScalarField& f, const std::string& name,
                      const std::string& units);
void write_field_text(std::ostream& os, const VectorField& f, const std::string& name,
                      const std::string& units);
void write_field_text(const std::string& path, const ScalarField& f, const std::string& name,
                      const std::string& units);
void write_field_text(const std::string& path, const VectorField& f, const std::string& name,
                      const std::string& units);

// Raw binary block: 16-byte magic "KGCONGRUENCE\0\0\0\0", little-endian u32
// dimension, u32 counts[n], f64 box extents[n], then f64 values in canonical
// site order (axis 1 fastest).  The lattice origin is not part of the format;
// readers reconstruct an origin-zero lattice.
inline constexpr std::array<char, 16> binary_magic = {'K', 'G', 'C', 'O', 'N', 'G', 'R', 'U',
                                                      'E', 'N', 'C', 'E', 0,   0,   0,   0};

void write_field_binary(std::ostream& os, const ScalarField& f);
void write_field_binary(const std::string& path, const ScalarField& f);
ScalarField read_field_binary(std::istream& is);
ScalarField read_field_binary(const std::string& path);

// Residual time series: `t, residual_name, value` per row.
struct ResidualSample {
    double t = 0.0;
    std::string name;
    double value = 0.0;
};

void write_residual_series(std::ostream& os, const std::vector<ResidualSample>& rows);
void write_residual_series(const std::string& path, const std::vector<ResidualSample>& rows);

// Per-trajectory samples: `label_index, t, q_1..q_d, tau, T`.
struct TrajectorySample {
    std::size_t label = 0;
    double t = 0.0;
    std::array<double, 3> q{};
    double tau = 0.0;
    double clock = 0.0;
};

void write_trajectories(std::ostream& os, const std::vector<TrajectorySample>& rows, int d);
void write_trajectories(const std::string& path, const std::vector<TrajectorySample>& rows,
                        int d);

// Boost-scaling report rows: `u, residual_eq34, residual_eq21, exponent,
// verdict` (the two residual columns are the equation-of-motion and density
// relation residuals; exponent is blank on rows where it is not defined).
struct CovarianceRow {
    double u = 0.0;
    double motion_residual = 0.0;
    double density_residual = 0.0;
    double exponent = 0.0;
    bool has_exponent = false;
    std::string verdict = "-";
};

void write_covariance_report(std::ostream& os, const std::vector<CovarianceRow>& rows);
void write_covariance_report(const std::string& path, const std::vector<CovarianceRow>& rows);

// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

} // namespace kgc
