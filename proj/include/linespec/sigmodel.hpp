#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "linespec/types.hpp"

namespace linespec {

/// Residual bound used when measurements are exact.
inline constexpr double kNoiselessEpsilon = 1e-10;

enum class AmplitudeMode { unit_random_phase, complex_gaussian };
enum class MatrixKind { gaussian, subsample };

/// A K-line signal of length N: f_n = sum_k x_k exp(j 2 pi w_k n), n = 1..N.
struct GroundTruth {
    std::vector<Frequency> frequencies;
    cvec amplitudes;
    cvec signal;
};

/// Compressive measurements y = A f + z with the residual bound epsilon = ||z||.
struct MeasurementModel {
    rmat a;
    cvec y;
    cvec noise;
    double epsilon = kNoiselessEpsilon;
    MatrixKind kind = MatrixKind::gaussian;
};

/// Draw K frequencies uniformly, rejection-sampling the whole set until all
/// pairwise circular gaps reach min_separation_bins / N, then draw amplitudes.
/// Deterministic given the seed. Requires k * min_separation_bins < n; throws
/// after a bounded number of whole-set retries if packing keeps failing.
GroundTruth gen_signal(int n, int k, double min_separation_bins, AmplitudeMode mode,
                       std::uint64_t seed);

/// M x N matrix of i.i.d. normal entries with variance 1/M, so columns have
/// unit expected squared norm.
rmat gaussian_matrix(int m, int n, std::uint64_t seed);

/// M distinct rows of the N x N identity, uniformly chosen and in random
/// order; m = n yields a permutation matrix.
rmat subsample_matrix(int m, int n, std::uint64_t seed);

/// Add complex white Gaussian noise scaled so that the realized SNR
/// ||y_clean||^2 / ||z||^2 equals 10^(snr_db/10) exactly. Returns the noisy
/// vector and epsilon = ||z||. An infinite snr_db returns the input unchanged
/// with the noiseless epsilon.
std::pair<cvec, double> add_noise(const cvec& y_clean, double snr_db, std::uint64_t seed);

/// Counter-based seed splitting: the value at position `index` of the
/// SplitMix64 stream started at `base`. Gives independent per-trial,
/// per-purpose seeds from one master seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace linespec
