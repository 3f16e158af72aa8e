#pragma once

#include "linespec/frame.hpp"
#include "linespec/polar.hpp"
#include "linespec/types.hpp"

namespace linespec {

enum class SolveMode { penalized, constrained };

/// Amplitude domain of the arc program. Complex is the benchmark default;
/// the real-nonnegative restriction mirrors the original program exactly and
/// is kept for unit tests against hand-computable cases.
enum class AmplitudeDomain { complex_amplitudes, real_nonnegative };

enum class SolveStatus { converged, max_iterations, infeasible };

struct SolverOptions {
    SolveMode mode = SolveMode::constrained;
    AmplitudeDomain domain = AmplitudeDomain::complex_amplitudes;
    double sigma = 0.0;      // penalized data weight 1/(2 sigma^2); <= 0 derives epsilon/sqrt(M)
    double epsilon = 1e-10;  // constrained residual bound
    int max_iterations = 20000;
    double tolerance = 1e-8;        // relative-change stopping tolerance
    double feasibility_tol = 1e-6;  // constraint satisfaction slack
    double tau = 1e-12;             // regularizer in the arc-localization check
};

struct ConvergenceReport {
    SolveStatus status = SolveStatus::max_iterations;
    bool converged = false;
    int iterations = 0;
    double objective = 0.0;      // penalized: data term + ||alpha||_1; constrained: ||alpha||_1
    double residual_norm = 0.0;  // ||y - A f_tilde||_2
    double max_constraint_violation = 0.0;
    std::vector<double> objective_trace;  // penalized mode: objective after every accepted step
};

/// Sparse inverse problem over polar arcs: find per-arc (alpha, beta, gamma)
/// with f_tilde = C alpha + U beta + V gamma such that either
///   penalized:   minimize ||y - A f_tilde||^2 / (2 sigma^2) + ||alpha||_1, or
///   constrained: minimize ||alpha||_1  s.t.  ||y - A f_tilde||_2 <= epsilon,
/// subject to each (beta_j, gamma_j) lying in the chord region of its arc:
/// sqrt(|beta_j|^2+|gamma_j|^2) <= r |alpha_j| and the cos-component of
/// (beta_j, gamma_j) along alpha_j at least r cos(theta_j) |alpha_j|.
/// The returned solution is NOT rescaled onto the arc circle (callers do that).
/// `init` (optional) warm-starts the iteration; it must use the same arc set.
std::pair<PolarSolution, ConvergenceReport> solve_polar(const cvec& y, const rmat& a,
                                                        const IndexSet& arcs, const DftFrame& frame,
                                                        const SolverOptions& opts,
                                                        const PolarSolution* init = nullptr);

/// minimize ||x||_1 subject to ||phi x - y||_2 <= epsilon (complex x).
/// Throws std::runtime_error when epsilon is below the least-squares residual
/// floor (no feasible point). Fills *report if given.
cvec solve_bpdn(const cvec& y, const cmat& phi, double epsilon, const SolverOptions& opts = {},
                ConvergenceReport* report = nullptr);

}  // namespace linespec
