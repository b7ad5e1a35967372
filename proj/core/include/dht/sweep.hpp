#pragma once

#include <string>
#include <vector>

#include "dht/bounds.hpp"
#include "dht/optimizer.hpp"
#include "dht/scenario_io.hpp"

namespace dht {

enum class RunMode { GaussianSweep, GaussianPoint, Discrete };
enum class Units { Nats, Bits };

struct SweepSpec {
    double rho0_min = 0.0;
    double rho0_max = 0.0;
    int steps = 0;
};

struct RunConfig {
    RunMode mode = RunMode::GaussianSweep;
    Units units = Units::Nats;
    bool normalize = false; // append columns divided by (rho0 - rho1)^2
    double rho0 = -1.0;
    double rho1 = -1.0;
    double rate = -1.0;
    SweepSpec sweep;
    std::vector<std::string> bounds; // discrete bound selection; empty = all
    TerminalBound terminal = TerminalBound::centralized();
    unsigned seed = 0;
    bool force_oracle = false;
    std::string scenario_path;
    std::string out_path;      // empty = stdout
    std::string plot_path;     // optional plot-data emission
    OptimizerConfig opt;
};

/// Interior 60-point sweeps encoding the comparison-figure captions:
/// rho0 at fractions k/61 of (rho1, 1), k = 1..60, normalized output.
RunConfig preset_fig2(); // rho1 = 0.7,  R = 0.5
RunConfig preset_fig3(); // rho1 = 0.25, R = 0.2

/// One CSV row per sweep point with columns rho0,rho1,R,rho,rw_bound,
/// new_bound,centralized,active_branch (plus *_norm columns when
/// normalize). Values are '.'-decimal with 12 significant digits;
/// byte-identical across runs for the same config. Every point is
/// validated against the closed-form region before any evaluation.
std::string run_gaussian_sweep(const RunConfig& cfg);

/// Human-readable evaluation of one (rho0, rho1, R) point.
std::string gaussian_point_report(const RunConfig& cfg);

struct DiscreteRun {
    std::string report;                 // human-readable table
    std::string csv;                    // machine-readable results
    std::vector<std::string> warnings;  // ordering violations etc.
    int evaluation_errors = 0;
};

/// Evaluate the selected bound set per named aux receiver (plus chains and
/// J augmentations); membership failures are reported per aux without
/// aborting the rest.
DiscreteRun run_discrete(const RunConfig& cfg, const ScenarioFile& sf);

/// Whitespace-delimited plot data (rho0 rho rw new centralized) with a
/// comment header naming columns and config; uses the normalized columns
/// when the CSV carries them.
std::string emit_plot_data(const std::string& csv, const std::string& style = "whitespace");

/// "%.12g" formatting used for all emitted numbers.
std::string format_sig(double v);

} // namespace dht
