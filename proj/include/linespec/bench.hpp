#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "linespec/frame.hpp"
#include "linespec/sigmodel.hpp"
#include "linespec/types.hpp"

namespace linespec {

/// Algorithm names accepted in configs and on the command line.
extern const std::vector<std::string> kAlgorithmNames;

/// Full description of a Monte Carlo sweep: problem sizes, sweep axes
/// (subsampling ratio and SNR), trial count, seeding, and solver knobs.
struct ExperimentConfig {
    int n = 100;
    int k = 4;
    int c = 5;
    std::vector<double> kappa_list{0.5};
    std::vector<double> snr_db_list{std::numeric_limits<double>::infinity()};
    int trials = 30;
    std::uint64_t seed = 1;
    std::vector<std::string> algorithms{"bomp", "cbp", "bisp", "l1synth_music"};
    double eta = 0.25;
    MatrixKind matrix_kind = MatrixKind::gaussian;
    double min_separation_bins = 1.0;
    int solver_max_iterations = 20000;
    double solver_tolerance = 1e-8;
    int jobs = 0;  ///< worker threads; 0 picks min(4, hardware)
};

/// One algorithm's result on one generated problem instance.
struct TrialRecord {
    int trial = 0;
    std::string algorithm;
    double kappa = 0.0;
    double snr_db = 0.0;  ///< +inf means noiseless
    double mean_freq_error_bins = 0.0;
    double signal_err = 0.0;
    double runtime_seconds = 0.0;
    bool converged = false;
    std::uint64_t seed = 0;  ///< derived per-trial seed (signal stream)
};

/// Aggregate over the converged trials of one (sweep point, algorithm) cell.
struct SummaryRow {
    double kappa = 0.0;
    double snr_db = 0.0;
    std::string algorithm;
    int trials = 0;
    double converged_fraction = 0.0;
    double freq_error_mean_bins = 0.0;
    double freq_error_stderr_bins = 0.0;
    double signal_error_mean = 0.0;
    double signal_error_stderr = 0.0;
};

struct SweepResult {
    std::vector<TrialRecord> records;
    std::vector<SummaryRow> summary;
};

/// Parse a flat key=value config (comma lists, `#` comments). Unknown keys
/// and malformed values throw std::runtime_error with a line diagnostic.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Echo a config as canonical key=value text (fixed key order, shortest
/// round-trip numbers), suitable for config.resolved.
std::string config_to_string(const ExperimentConfig& cfg);

/// Throws std::runtime_error when the config is unusable (bad sizes, kappa
/// out of range, unknown algorithm, infeasible tone packing, ...).
void validate_config(const ExperimentConfig& cfg);

/// Generate one problem instance from the per-trial seed and run every
/// requested algorithm on identical data. Algorithm failures are recorded
/// (converged=false, NaN metrics), never thrown.
std::vector<TrialRecord> run_trial(const ExperimentConfig& cfg, const DftFrame& frame,
                                   int sweep_index, double kappa, double snr_db, int trial);

/// Full factorial over kappa_list x snr_db_list x trials, optionally on a
/// small thread pool. Record order is deterministic regardless of jobs.
SweepResult run_sweep(const ExperimentConfig& cfg);

/// Write raw.csv, summary.csv, timings.csv, and config.resolved into out_dir
/// (created if missing). Every file except timings.csv is byte-deterministic
/// for a given (config, seed); timings.csv carries the wall-clock column.
void write_outputs(const ExperimentConfig& cfg, const SweepResult& result,
                   const std::filesystem::path& out_dir);

/// Preset: noiseless recovery across subsampling ratios 0.1..1.0.
ExperimentConfig preset_ratio_sweep();
/// Preset: fixed ratio 0.5 across SNR 0..20 dB.
ExperimentConfig preset_snr_sweep();

/// Shortest round-trip decimal form of a double ("inf"/"nan" spelled out).
std::string format_number(double v);

}  // namespace linespec
