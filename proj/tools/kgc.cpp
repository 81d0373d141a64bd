// Command-line front end: config-driven runs, verification suites, and
// closed-form reference tables.
//
// Exit codes: 0 all checks passed, 1 at least one check failed, 2 bad
// configuration or usage, 3 the run aborted (trajectory crossing, regular
// window exceeded, ...).  Aborted runs still leave a manifest naming the
// failure site and time.

#include <CLI11.hpp>

#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "kgc/config_file.hpp"
#include "kgc/errors.hpp"
#include "kgc/oracles.hpp"
#include "kgc/run.hpp"
#include "kgc/serialize.hpp"

namespace {

void print_report(const kgc::RunReport& rep) {
    for (const auto& c : rep.checks)
        std::cout << (c.pass ? "[ PASS ] " : "[ FAIL ] ") << c.name
                  << "  value = " << kgc::format_double(c.value)
                  << "  bound = " << kgc::format_double(c.bound) << "\n";
    std::cout << "run: " << (rep.all_pass() ? "PASS" : "FAIL") << "\n";
    std::cout << "manifest: " << rep.manifest_path << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"kgc - trajectory-state simulator for massless and Klein-Gordon congruences"};
    app.require_subcommand(1);
    app.fallthrough();    // global flags may follow the subcommand

    kgc::RunOptions opts;
    app.add_option("--out-dir", opts.out_dir, "directory for manifests and field dumps")
        ->capture_default_str();
    app.add_option("--threads", opts.threads, "worker threads (0 = library default)")
        ->capture_default_str();
    app.add_option("--seed", opts.seed, "seed recorded in the run manifest")
        ->capture_default_str();

    std::string wave_config;
    CLI::App* wave = app.add_subcommand("wave", "run a massless congruence from a config file");
    wave->add_option("config", wave_config, "config file path")
        ->required()
        ->check(CLI::ExistingFile);

    std::string kg_config;
    CLI::App* kg = app.add_subcommand("kg", "run a massive congruence from a config file");
    kg->add_option("config", kg_config, "config file path")->required()->check(CLI::ExistingFile);

    std::string suite;
    CLI::App* verify = app.add_subcommand("verify", "run a named verification suite");
    verify->add_option("suite", suite, "core, wave, kg, covariance, or all")->required();

    std::vector<double> kvec;
    double mass = 1.0;
    double amplitude = 1.0;
    double phase = std::numbers::pi / 2.0;
    double t_end = 0.0;
    int rows = 33;
    CLI::App* pwc =
        app.add_subcommand("planewave", "print closed-form plane-wave reference tables");
    pwc->add_option("--k", kvec, "wave vector components (1 to 3)")
        ->required()
        ->expected(1, 3);
    pwc->add_option("--m", mass, "mass (0 selects the massless branch)")
        ->capture_default_str();
    pwc->add_option("--amplitude", amplitude, "wave amplitude")->capture_default_str();
    pwc->add_option("--phase", phase, "phase offset")->capture_default_str();
    pwc->add_option("--t-end", t_end, "table end time (0 = one period)")
        ->capture_default_str();
    pwc->add_option("--rows", rows, "number of table rows")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;    // --help exits clean; bad usage is a config error
    }

    try {
        if (wave->parsed()) {
            const kgc::RunReport rep = kgc::run_wave(kgc::ConfigFile::load(wave_config), opts);
            print_report(rep);
            return rep.all_pass() ? 0 : 1;
        } else if (kg->parsed()) {
            const kgc::RunReport rep = kgc::run_kg(kgc::ConfigFile::load(kg_config), opts);
            print_report(rep);
            return rep.all_pass() ? 0 : 1;
        } else if (verify->parsed()) {
            const kgc::SuiteResult res = kgc::run_suite(suite, std::cout, opts);
            return res.all_pass() ? 0 : 1;
        } else if (pwc->parsed()) {
            if (mass < 0.0) throw kgc::ConfigError("--m must be nonnegative");
            kgc::oracle::PlaneWave pw;
            pw.k = kvec;
            pw.amplitude = amplitude;
            pw.phase = phase;
            pw.massive = mass > 0.0;
            if (pw.massive) pw.constants = kgc::PhysicalConstants(1.0, 1.0, mass);
            kgc::planewave_tables(pw, t_end, rows, std::cout);
            return 0;
        }
    } catch (const kgc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const kgc::CFLViolation& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const kgc::DispersionViolation& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const kgc::Error& e) {
        std::cerr << "run failed: " << e.what() << "\n";
        return 3;
    }

    return 0;
}
