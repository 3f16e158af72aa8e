#include "linespec/sigmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

namespace linespec {
namespace {

std::mt19937_64 engine(std::uint64_t seed) { return std::mt19937_64(seed); }

bool well_separated(const std::vector<Frequency>& w, double min_gap) {
    for (size_t i = 0; i < w.size(); ++i)
        for (size_t j = i + 1; j < w.size(); ++j)
            if (circular_distance(w[i], w[j]) < min_gap) return false;
    return true;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    // SplitMix64: jump the state directly to position index, then finalize.
    std::uint64_t z = base + (index + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

GroundTruth gen_signal(int n, int k, double min_separation_bins, AmplitudeMode mode,
                       std::uint64_t seed) {
    if (n < 1 || k < 1) throw std::invalid_argument("gen_signal: n and k must be positive");
    if (min_separation_bins < 0.0) throw std::invalid_argument("gen_signal: negative separation");
    if (k * min_separation_bins >= n)
        throw std::invalid_argument("gen_signal: k tones with this separation cannot fit");

    auto rng = engine(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double min_gap = min_separation_bins / n;

    GroundTruth truth;
    truth.frequencies.resize(k);
    constexpr int kMaxRetries = 100000;
    int attempt = 0;
    do {
        if (++attempt > kMaxRetries)
            throw std::runtime_error("gen_signal: separation constraint kept failing");
        for (int i = 0; i < k; ++i) truth.frequencies[i] = Frequency(unif(rng));
    } while (!well_separated(truth.frequencies, min_gap));

    truth.amplitudes.resize(k);
    if (mode == AmplitudeMode::unit_random_phase) {
        for (int i = 0; i < k; ++i)
            truth.amplitudes[i] = std::polar(1.0, 2.0 * std::numbers::pi * unif(rng));
    } else {
        std::normal_distribution<double> gauss(0.0, std::numbers::sqrt2 / 2.0);
        for (int i = 0; i < k; ++i) {
            const double re = gauss(rng);
            truth.amplitudes[i] = cx(re, gauss(rng));
        }
    }

    truth.signal = cvec::Zero(n);
    for (int i = 0; i < k; ++i)
        for (int t = 1; t <= n; ++t)
            truth.signal[t - 1] +=
                truth.amplitudes[i] *
                std::polar(1.0, 2.0 * std::numbers::pi * truth.frequencies[i].value * t);
    return truth;
}

rmat gaussian_matrix(int m, int n, std::uint64_t seed) {
    if (m < 1 || n < m) throw std::invalid_argument("gaussian_matrix: need 1 <= m <= n");
    auto rng = engine(seed);
    std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(static_cast<double>(m)));
    rmat a(m, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = gauss(rng);
    return a;
}

rmat subsample_matrix(int m, int n, std::uint64_t seed) {
    if (m < 1 || n < m) throw std::invalid_argument("subsample_matrix: need 1 <= m <= n");
    auto rng = engine(seed);
    std::vector<int> rows(n);
    std::iota(rows.begin(), rows.end(), 0);
    std::shuffle(rows.begin(), rows.end(), rng);
    rmat a = rmat::Zero(m, n);
    for (int i = 0; i < m; ++i) a(i, rows[i]) = 1.0;
    return a;
}

std::pair<cvec, double> add_noise(const cvec& y_clean, double snr_db, std::uint64_t seed) {
    if (std::isinf(snr_db) && snr_db > 0.0) return {y_clean, kNoiselessEpsilon};
    if (!std::isfinite(snr_db)) throw std::invalid_argument("add_noise: snr must be finite or +inf");
    const double signal_norm = y_clean.norm();
    if (signal_norm == 0.0)
        throw std::invalid_argument("add_noise: zero signal with finite snr");

    auto rng = engine(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    cvec z(y_clean.size());
    for (int i = 0; i < z.size(); ++i) {
        const double re = gauss(rng);
        z[i] = cx(re, gauss(rng));
    }
    // scale the realized vector so the sample SNR is exact
    const double target = signal_norm * std::pow(10.0, -snr_db / 20.0);
    z *= target / z.norm();
    return {y_clean + z, target};
}

}  // namespace linespec
