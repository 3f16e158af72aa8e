#include "linespec/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "linespec/baselines.hpp"
#include "linespec/metrics.hpp"
#include "linespec/pursuit.hpp"

namespace linespec {

const std::vector<std::string> kAlgorithmNames = {"bomp", "cbp", "bisp", "l1synth_music"};

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::runtime_error("format_number: conversion failed");
    return std::string(buf, ptr);
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> items;
    std::string cur;
    std::stringstream ss(s);
    while (std::getline(ss, cur, ',')) {
        cur = trim(cur);
        if (!cur.empty()) items.push_back(cur);
    }
    return items;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
    throw std::runtime_error("config: bad value '" + value + "' for key '" + key + "'");
}

long long parse_int(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const long long v = std::stoll(value, &pos);
        if (pos != value.size()) bad_value(key, value);
        return v;
    } catch (const std::logic_error&) {
        bad_value(key, value);
    }
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size() || value.find('-') != std::string::npos) bad_value(key, value);
        return v;
    } catch (const std::logic_error&) {
        bad_value(key, value);
    }
}

double parse_real(const std::string& key, const std::string& value) {
    if (value == "inf" || value == "noiseless")
        return std::numeric_limits<double>::infinity();
    try {
        size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) bad_value(key, value);
        return v;
    } catch (const std::logic_error&) {
        bad_value(key, value);
    }
}

std::vector<double> parse_real_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    for (const auto& item : split_list(value)) out.push_back(parse_real(key, item));
    return out;
}

void apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "n") cfg.n = static_cast<int>(parse_int(key, value));
    else if (key == "k") cfg.k = static_cast<int>(parse_int(key, value));
    else if (key == "c") cfg.c = static_cast<int>(parse_int(key, value));
    else if (key == "kappa_list") cfg.kappa_list = parse_real_list(key, value);
    else if (key == "snr_db_list") cfg.snr_db_list = parse_real_list(key, value);
    else if (key == "trials") cfg.trials = static_cast<int>(parse_int(key, value));
    else if (key == "seed") cfg.seed = parse_uint(key, value);
    else if (key == "algorithms") cfg.algorithms = split_list(value);
    else if (key == "eta") cfg.eta = parse_real(key, value);
    else if (key == "matrix_kind") {
        if (value == "gaussian") cfg.matrix_kind = MatrixKind::gaussian;
        else if (value == "subsample") cfg.matrix_kind = MatrixKind::subsample;
        else bad_value(key, value);
    } else if (key == "min_separation_bins") cfg.min_separation_bins = parse_real(key, value);
    else if (key == "solver_max_iterations") cfg.solver_max_iterations = static_cast<int>(parse_int(key, value));
    else if (key == "solver_tolerance") cfg.solver_tolerance = parse_real(key, value);
    else if (key == "jobs") cfg.jobs = static_cast<int>(parse_int(key, value));
    else throw std::runtime_error("config: unknown key '" + key + "'");
}

std::string join_numbers(const std::vector<double>& xs) {
    std::string out;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ",";
        out += format_number(xs[i]);
    }
    return out;
}

std::string join_strings(const std::vector<std::string>& xs) {
    std::string out;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ",";
        out += xs[i];
    }
    return out;
}

int measurement_count(double kappa, int n) {
    return static_cast<int>(std::lround(kappa * n));
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: line " + std::to_string(lineno) +
                                     " is not a key=value pair");
        apply_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string config_to_string(const ExperimentConfig& cfg) {
    std::string out;
    out += "n=" + std::to_string(cfg.n) + "\n";
    out += "k=" + std::to_string(cfg.k) + "\n";
    out += "c=" + std::to_string(cfg.c) + "\n";
    out += "kappa_list=" + join_numbers(cfg.kappa_list) + "\n";
    out += "snr_db_list=" + join_numbers(cfg.snr_db_list) + "\n";
    out += "trials=" + std::to_string(cfg.trials) + "\n";
    out += "seed=" + std::to_string(cfg.seed) + "\n";
    out += "algorithms=" + join_strings(cfg.algorithms) + "\n";
    out += "eta=" + format_number(cfg.eta) + "\n";
    out += std::string("matrix_kind=") +
           (cfg.matrix_kind == MatrixKind::gaussian ? "gaussian" : "subsample") + "\n";
    out += "min_separation_bins=" + format_number(cfg.min_separation_bins) + "\n";
    out += "solver_max_iterations=" + std::to_string(cfg.solver_max_iterations) + "\n";
    out += "solver_tolerance=" + format_number(cfg.solver_tolerance) + "\n";
    out += "jobs=" + std::to_string(cfg.jobs) + "\n";
    return out;
}

void validate_config(const ExperimentConfig& cfg) {
    auto fail = [](const std::string& msg) { throw std::runtime_error("config: " + msg); };
    if (cfg.n < 2) fail("n must be at least 2");
    if (cfg.k < 1) fail("k must be positive");
    if (cfg.c < 1) fail("c must be positive");
    if (cfg.trials < 1) fail("trials must be positive");
    if (cfg.eta < 0.0 || cfg.eta >= 1.0) fail("eta must be in [0, 1)");
    if (cfg.kappa_list.empty()) fail("kappa_list is empty");
    if (cfg.snr_db_list.empty()) fail("snr_db_list is empty");
    for (double kap : cfg.kappa_list) {
        if (!(kap > 0.0) || kap > 1.0) fail("kappa must lie in (0, 1]");
        if (measurement_count(kap, cfg.n) < cfg.k)
            fail("kappa " + format_number(kap) + " gives fewer measurements than k");
    }
    for (double snr : cfg.snr_db_list)
        if (std::isnan(snr) || (std::isinf(snr) && snr < 0)) fail("snr must be finite or inf");
    for (const auto& name : cfg.algorithms)
        if (std::find(kAlgorithmNames.begin(), kAlgorithmNames.end(), name) ==
            kAlgorithmNames.end())
            fail("unknown algorithm '" + name + "'");
    if (cfg.min_separation_bins < 0.0) fail("min_separation_bins must be nonnegative");
    if (cfg.k * cfg.min_separation_bins >= cfg.n) fail("k tones cannot fit at this separation");
    if (cfg.solver_max_iterations < 1) fail("solver_max_iterations must be positive");
    if (!(cfg.solver_tolerance > 0.0)) fail("solver_tolerance must be positive");
    if (cfg.jobs < 0) fail("jobs must be nonnegative");
}

std::vector<TrialRecord> run_trial(const ExperimentConfig& cfg, const DftFrame& frame,
                                   int sweep_index, double kappa, double snr_db, int trial) {
    const auto counter =
        (static_cast<std::uint64_t>(sweep_index) * cfg.trials + trial) * 3;
    const std::uint64_t seed_signal = derive_seed(cfg.seed, counter);
    const std::uint64_t seed_matrix = derive_seed(cfg.seed, counter + 1);
    const std::uint64_t seed_noise = derive_seed(cfg.seed, counter + 2);

    const GroundTruth truth = gen_signal(cfg.n, cfg.k, cfg.min_separation_bins,
                                         AmplitudeMode::unit_random_phase, seed_signal);
    const int m = measurement_count(kappa, cfg.n);
    const rmat a = cfg.matrix_kind == MatrixKind::gaussian
                       ? gaussian_matrix(m, cfg.n, seed_matrix)
                       : subsample_matrix(m, cfg.n, seed_matrix);
    const cvec y_clean = real_complex_product(a, truth.signal);
    const auto [y, epsilon] = add_noise(y_clean, snr_db, seed_noise);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<TrialRecord> records;
    records.reserve(cfg.algorithms.size());
    for (const auto& name : cfg.algorithms) {
        TrialRecord rec;
        rec.trial = trial;
        rec.algorithm = name;
        rec.kappa = kappa;
        rec.snr_db = snr_db;
        rec.mean_freq_error_bins = nan;
        rec.signal_err = nan;
        rec.seed = seed_signal;
        const auto start = std::chrono::steady_clock::now();
        try {
            std::vector<Frequency> est_freqs;
            cvec est_signal;
            if (name == "l1synth_music") {
                est_signal = l1_synthesis_recover(y, a, frame, epsilon);
                MusicConfig mc;
                mc.peaks = cfg.k;
                mc.base_grid = frame.p;
                for (const auto& pk : music_frequencies(est_signal, mc).peaks)
                    est_freqs.push_back(pk.frequency);
            } else {
                PursuitConfig pc;
                pc.k = cfg.k;
                pc.eta = cfg.eta;
                pc.solver.epsilon = epsilon;
                pc.solver.max_iterations = cfg.solver_max_iterations;
                pc.solver.tolerance = cfg.solver_tolerance;
                const LineEstimate est = name == "bomp"  ? bomp(y, a, frame, pc)
                                         : name == "cbp" ? cbp(y, a, frame, pc)
                                                         : bisp(y, a, frame, pc);
                est_freqs = est.frequencies;
                est_signal = est.signal;
            }
            if (!est_freqs.empty()) {
                rec.mean_freq_error_bins =
                    hungarian_match(truth.frequencies, est_freqs, cfg.n).mean_error;
                rec.signal_err = signal_error(truth.signal, est_signal);
                rec.converged = static_cast<int>(est_freqs.size()) == cfg.k;
            }
        } catch (const std::exception&) {
            rec.converged = false;
        }
        rec.runtime_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        records.push_back(std::move(rec));
    }
    return records;
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
    validate_config(cfg);
    SweepResult out;
    if (cfg.algorithms.empty()) return out;

    const DftFrame frame = build_frame(cfg.n, cfg.c);
    std::vector<std::pair<double, double>> points;
    for (double kap : cfg.kappa_list)
        for (double snr : cfg.snr_db_list) points.emplace_back(kap, snr);

    const int total = static_cast<int>(points.size()) * cfg.trials;
    std::vector<std::vector<TrialRecord>> slots(total);

    int jobs = cfg.jobs;
    if (jobs == 0)
        jobs = static_cast<int>(std::min(4u, std::max(1u, std::thread::hardware_concurrency())));
    jobs = std::min(jobs, total);

    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const int t = next.fetch_add(1);
            if (t >= total) return;
            const int sweep = t / cfg.trials;
            const int trial = t % cfg.trials;
            try {
                slots[t] = run_trial(cfg, frame, sweep, points[sweep].first,
                                     points[sweep].second, trial);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    for (auto& slot : slots)
        for (auto& rec : slot) out.records.push_back(std::move(rec));

    // one summary row per (sweep point, algorithm), in sweep-then-config order
    const int algos = static_cast<int>(cfg.algorithms.size());
    for (size_t p = 0; p < points.size(); ++p) {
        for (int a = 0; a < algos; ++a) {
            SummaryRow row;
            row.kappa = points[p].first;
            row.snr_db = points[p].second;
            row.algorithm = cfg.algorithms[a];
            row.trials = cfg.trials;
            std::vector<double> freq_errors, sig_errors;
            int converged = 0;
            for (int t = 0; t < cfg.trials; ++t) {
                const auto& rec =
                    out.records[(p * cfg.trials + t) * algos + a];
                if (!rec.converged) continue;
                ++converged;
                if (std::isfinite(rec.mean_freq_error_bins))
                    freq_errors.push_back(rec.mean_freq_error_bins);
                if (std::isfinite(rec.signal_err)) sig_errors.push_back(rec.signal_err);
            }
            row.converged_fraction = static_cast<double>(converged) / cfg.trials;
            auto mean_stderr = [](const std::vector<double>& xs) {
                if (xs.empty())
                    return std::pair<double, double>{std::numeric_limits<double>::quiet_NaN(),
                                                     std::numeric_limits<double>::quiet_NaN()};
                double mean = 0.0;
                for (double x : xs) mean += x;
                mean /= xs.size();
                if (xs.size() == 1) return std::pair<double, double>{mean, 0.0};
                double var = 0.0;
                for (double x : xs) var += (x - mean) * (x - mean);
                var /= (xs.size() - 1);
                return std::pair<double, double>{mean, std::sqrt(var / xs.size())};
            };
            std::tie(row.freq_error_mean_bins, row.freq_error_stderr_bins) =
                mean_stderr(freq_errors);
            std::tie(row.signal_error_mean, row.signal_error_stderr) = mean_stderr(sig_errors);
            out.summary.push_back(std::move(row));
        }
    }
    return out;
}

void write_outputs(const ExperimentConfig& cfg, const SweepResult& result,
                   const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    auto open = [&](const char* name) {
        std::ofstream f(out_dir / name, std::ios::binary);
        if (!f) throw std::runtime_error(std::string("cannot write ") + name);
        return f;
    };

    {
        auto f = open("config.resolved");
        f << config_to_string(cfg);
    }
    {
        auto f = open("raw.csv");
        f << "kappa,snr_db,algorithm,trial,seed,mean_freq_error_bins,signal_error,converged\n";
        for (const auto& r : result.records)
            f << format_number(r.kappa) << ',' << format_number(r.snr_db) << ',' << r.algorithm
              << ',' << r.trial << ',' << r.seed << ',' << format_number(r.mean_freq_error_bins)
              << ',' << format_number(r.signal_err) << ',' << (r.converged ? '1' : '0') << '\n';
    }
    {
        auto f = open("summary.csv");
        f << "kappa,snr_db,algorithm,trials,converged_fraction,freq_error_mean_bins,"
             "freq_error_stderr_bins,signal_error_mean,signal_error_stderr\n";
        for (const auto& s : result.summary)
            f << format_number(s.kappa) << ',' << format_number(s.snr_db) << ',' << s.algorithm
              << ',' << s.trials << ',' << format_number(s.converged_fraction) << ','
              << format_number(s.freq_error_mean_bins) << ','
              << format_number(s.freq_error_stderr_bins) << ','
              << format_number(s.signal_error_mean) << ','
              << format_number(s.signal_error_stderr) << '\n';
    }
    {
        // wall-clock lives apart so the files above stay byte-reproducible
        auto f = open("timings.csv");
        f << "kappa,snr_db,algorithm,trial,runtime_seconds\n";
        for (const auto& r : result.records)
            f << format_number(r.kappa) << ',' << format_number(r.snr_db) << ',' << r.algorithm
              << ',' << r.trial << ',' << format_number(r.runtime_seconds) << '\n';
    }
}

ExperimentConfig preset_ratio_sweep() {
    ExperimentConfig cfg;
    cfg.kappa_list = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    cfg.snr_db_list = {std::numeric_limits<double>::infinity()};
    return cfg;
}

ExperimentConfig preset_snr_sweep() {
    ExperimentConfig cfg;
    cfg.kappa_list = {0.5};
    cfg.snr_db_list = {0.0, 5.0, 10.0, 15.0, 20.0};
    return cfg;
}

}  // namespace linespec
