#pragma once

#include "linespec/types.hpp"

namespace linespec {

/// Overcomplete DFT frame: P = c*N unit-norm atoms on the uniform grid
/// omega_p = p / P, p = 0..P-1, for signals of length N.
struct DftFrame {
    int n = 0;           // signal length N
    int redundancy = 0;  // c
    int p = 0;           // number of atoms P = c*N
    double delta = 0.0;  // grid spacing 1/P
    cmat atoms;          // N x P, column p = atom(grid_frequency(p))

    Frequency grid_frequency(int idx) const { return Frequency(static_cast<double>(idx) * delta); }

    /// Nearest grid index to a frequency (circular).
    int nearest_index(const Frequency& w) const;
};

/// Build the frame for signal length n >= 2 and redundancy c >= 1.
DftFrame build_frame(int n, int redundancy);

/// Unit-norm complex sinusoid of length n: entry for time index t = 1..n is
/// exp(j*2*pi*omega*t)/sqrt(n). Stored at vector position t-1.
cvec atom(int n, const Frequency& omega);

/// Coherence |<d(w1), d(w2)>| via the closed-form Dirichlet kernel
/// |sin(pi*n*delta) / (n*sin(pi*delta))|, delta = (w1 - w2) mod 1.
double coherence(int n, const Frequency& w1, const Frequency& w2);

/// eta-coherence band B_eta(s): all grid indices i with
/// coherence(atom_i, atom_k) > eta for some k in s. Returns sorted unique indices.
IndexSet coherence_band(const DftFrame& frame, const IndexSet& s, double eta);

}  // namespace linespec
