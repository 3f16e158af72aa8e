#pragma once

#include "linespec/cvx.hpp"
#include "linespec/frame.hpp"
#include "linespec/polar.hpp"
#include "linespec/types.hpp"

namespace linespec {

/// Output of a line-spectral pursuit: up to K estimated lines plus the
/// synthesized signal. Frequencies are sorted by amplitude magnitude,
/// largest first, and are pairwise excluded at the configured coherence
/// level. signal = sum_k amplitudes[k] * atom(frequencies[k]) and
/// residual_norm = ||y - A signal||.
struct LineEstimate {
    std::vector<Frequency> frequencies;
    cvec amplitudes;  // atom-domain amplitudes
    cvec signal;      // length N
    double residual_norm = 0.0;
    std::vector<double> residual_trace;  // per-iteration residual norms
    bool solver_converged = true;
};

struct PursuitConfig {
    int k = 1;                     // number of lines sought
    double eta = 0.25;             // coherence-band exclusion level
    SolverOptions solver;          // arc-program options (epsilon, mode, ...)
    int max_outer_iterations = 0;  // 0 -> max(k, 10)
};

/// argmax_i |<proxy, phi_i>| over grid indices outside the eta-coherence band
/// of `selected`. Ties resolve to the lowest index. Returns -1 when the band
/// exclusion leaves no candidate.
int correlation_select(const cvec& proxy, const cmat& phi, const IndexSet& selected,
                       const DftFrame& frame, double eta);

/// Band-excluded orthogonal matching pursuit on the compressed frame
/// phi = A * atoms. On-grid frequency estimates.
LineEstimate bomp(const cvec& y, const rmat& a, const DftFrame& frame, const PursuitConfig& cfg);

/// Continuous pursuit over every arc at once: one arc-program solve on the
/// full grid, rescale, recover, keep the K largest band-excluded lines,
/// then re-fit amplitudes by least squares.
LineEstimate cbp(const cvec& y, const rmat& a, const DftFrame& frame, const PursuitConfig& cfg);

/// Subspace-style iterative pursuit: grid-domain selection and pruning picks
/// K arcs per iteration, the arc program runs on those arcs plus their grid
/// neighbors, and iterations continue while the synthesis residual strictly
/// decreases. Returns the best iterate (the grid-only initialization counts
/// as a candidate, so the result never does worse than its own start).
LineEstimate bisp(const cvec& y, const rmat& a, const DftFrame& frame, const PursuitConfig& cfg);

}  // namespace linespec
