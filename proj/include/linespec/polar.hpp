#pragma once

#include "linespec/frame.hpp"
#include "linespec/types.hpp"

namespace linespec {

/// Circular-arc interpolator for one grid cell: the three atoms at
/// center - width/2, center, center + width/2 are written exactly as
///   d(center + phi*width/(2*theta)) ~= c + r*cos(phi)*u + r*sin(phi)*v,
/// phi in [-theta, theta], by solving the 3x3 node system.
struct PolarTriple {
    Frequency center;
    double width = 0.0;  // frequency extent of the arc (= grid spacing)
    double theta = 0.0;  // arc half-angle
    double r = 1.0;      // atom norm
    cvec c, u, v;        // interpolation vectors, length N
};

/// Per-arc coefficient triple for a set of arcs. beta/gamma hold the
/// cos/sin components scaled by the (complex) arc amplitudes alpha.
struct PolarSolution {
    IndexSet arcs;                  // grid indices, one per coefficient
    std::vector<Frequency> centers; // arc center frequencies
    cvec alpha, beta, gamma;        // length J
    rvec theta;                     // per-arc half-angle
    double width = 0.0;
    double r = 1.0;
};

/// One recovered spectral line, still tied to the arc it came from.
struct RecoveredLine {
    Frequency frequency;
    cx amplitude;  // atom-domain amplitude (multiplies the unit-norm atom)
    int arc = 0;   // originating grid index
};

struct CuvMatrices {
    cmat c, u, v;  // N x J
    rvec theta;    // length J
    double width = 0.0;
    double r = 1.0;
};

/// Build the interpolator for grid cell p of the frame.
PolarTriple polar_triple(const DftFrame& frame, int p);

/// Stack polar triples for the listed arcs into N x J matrices,
/// preserving order. Indices must be in range and duplicate-free.
CuvMatrices assemble_cuv(const DftFrame& frame, const IndexSet& arcs);

/// f_tilde = C*alpha + U*beta + V*gamma for the solution's arcs.
cvec synthesize(const DftFrame& frame, const PolarSolution& sol);

/// Project each (beta_j, gamma_j) back onto the arc circle of radius
/// r*|alpha_j|; a zero pair maps to (r*|alpha_j|, 0).
PolarSolution rescale(const PolarSolution& sol);

/// Per-arc frequency/amplitude estimates: frequency = center + width/(2*theta) * phi
/// with phi = atan2(Re(gamma conj(alpha)), Re(beta conj(alpha))) clamped to
/// [-theta, theta]. Arcs with alpha_j = 0 are skipped. Sorted by |amplitude|, largest first.
std::vector<RecoveredLine> recover_frequencies(const PolarSolution& sol);

}  // namespace linespec
