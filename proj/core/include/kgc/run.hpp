#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "kgc/config_file.hpp"
#include "kgc/congruence.hpp"
#include "kgc/deposit.hpp"
#include "kgc/manifest.hpp"
#include "kgc/oracles.hpp"
#include "kgc/sim_config.hpp"

namespace kgc {

inline const char* version() { return "0.1.0"; }

struct RunOptions {
    std::string out_dir = ".";
    int threads = 0;               // 0 keeps the library default
    long long seed = 0;            // recorded only; no core math consumes it
};

// One named verification with its measured value against its bound; `pass`
// is the recorded verdict (some checks pass on a window rather than a simple
// upper bound, so it is stored, not derived).
struct CheckResult {
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct RunReport {
    Manifest manifest;
    std::vector<CheckResult> checks;
    std::string manifest_path;

    bool all_pass() const;
};

// ---------------------------------------------------------------- pipelines
// Mid-level drivers shared by the command layer and the acceptance harness.
// They evolve, deposit, and reconstruct, but decide nothing about bounds.

struct WavePipeline {
    SimConfig cfg;
    double dt = 0.0;                         // actual step after rounding
    std::vector<CongruenceState> snaps;      // uniform snapshot cadence
    std::vector<SpatialFields> fields;       // deposits at the snapshots
    std::vector<ScalarField> psi;            // quadrature amplitude per snapshot
    std::vector<double> min_jacobian;        // per snapshot
};

WavePipeline run_wave_pipeline(const SimConfig& cfg, const CauchyData& cauchy, double t_end);

struct KgPipeline {
    SimConfig cfg;
    double dt = 0.0;
    std::vector<KgCongruenceState> snaps;
    std::vector<KgSpatialFields> fields;
    std::vector<ScalarField> psi;            // propagator-route amplitude per snapshot
    std::vector<double> min_jacobian;
};

KgPipeline run_kg_pipeline(const SimConfig& cfg, const CauchyData& cauchy, double t_end);

// ----------------------------------------------------------------- commands
// Config-driven batch runs: evolve, verify the requested checks, write the
// artifact set (manifest, field dumps, residual series, trajectory tables)
// under opts.out_dir.  On model failures (trajectory crossing, window exit)
// the manifest is still written, naming the failure, before the error
// propagates to the caller.

RunReport run_wave(const ConfigFile& config, const RunOptions& opts);
RunReport run_kg(const ConfigFile& config, const RunOptions& opts);

// --------------------------------------------------------------- suites
struct SuiteResult {
    std::vector<CheckResult> checks;
    bool all_pass() const;
};

// suite is one of: core, wave, kg, covariance, all.  Prints one line per
// check plus a summary to `os`; the covariance suite also writes its
// residual-scaling report under opts.out_dir.
SuiteResult run_suite(const std::string& suite, std::ostream& os, const RunOptions& opts);

// ------------------------------------------------------------- closed forms
// Plane-wave tables: derived constants as `# key = value` lines, then a CSV
// of the trajectory through label a = 0 over `t_end` (defaults to one clock
// period when massive, one wave period when massless).
void planewave_tables(const oracle::PlaneWave& pw, double t_end, int rows, std::ostream& os);

// Cusp-to-cusp period measurement on a sampled clock trace: successive
// minima located by intersecting the straight branches on either side of
// each cusp; the modulus repeats every second cusp.  Needs at least two
// cusps in the trace.
double measured_clock_period(const std::vector<double>& t, const std::vector<double>& T);

} // namespace kgc
