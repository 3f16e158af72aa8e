#pragma once

#include <vector>

#include "linespec/cvx.hpp"
#include "linespec/frame.hpp"
#include "linespec/types.hpp"

namespace linespec {

/// Parameters for subspace-based frequency extraction from a time signal.
struct MusicConfig {
    int peaks = 1;             ///< number of frequencies to extract
    int subvector_length = 0;  ///< covariance window length L; 0 picks floor(N/2)
    int grid_refinement = 20;  ///< search-grid oversampling relative to base_grid
    int base_grid = 0;         ///< base grid density over [0,1); 0 picks 5*N
};

struct MusicPeak {
    Frequency frequency;
    double height = 0.0;  ///< pseudospectrum value at the refined peak
    bool weak = false;    ///< far below the strongest peak; likely spurious
};

struct MusicResult {
    std::vector<MusicPeak> peaks;  ///< strongest first
    bool complete = true;          ///< false when fewer peaks than requested exist
};

/// Recover a length-N signal from compressive measurements by basis pursuit
/// over the frame synthesis dictionary: minimize the coefficient l1 norm
/// subject to a residual bound, then synthesize.
cvec l1_synthesis_recover(const cvec& y, const rmat& a, const DftFrame& frame, double epsilon,
                          const SolverOptions& opts = {}, ConvergenceReport* report = nullptr);

/// Estimate sinusoid frequencies from a time signal via MUSIC: forward-
/// backward averaged covariance over all length-L windows, noise-subspace
/// pseudospectrum on a fine circular grid, then one quadratic refinement per
/// peak. Peaks are kept at least one base grid step apart. Throws on a zero
/// or too-short input and on infeasible window lengths.
MusicResult music_frequencies(const cvec& f_hat, const MusicConfig& cfg);

}  // namespace linespec
