#include "linespec/frame.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace linespec {

namespace {
constexpr double pi = std::numbers::pi;
}

int DftFrame::nearest_index(const Frequency& w) const {
    int idx = static_cast<int>(std::lround(w.value / delta)) % p;
    if (idx < 0) idx += p;
    // lround ties and wrap both resolved; verify against circular distance of neighbors
    double best = circular_distance(grid_frequency(idx), w);
    for (int cand : {idx - 1, idx + 1}) {
        int c = (cand % p + p) % p;
        double d = circular_distance(grid_frequency(c), w);
        if (d < best) {
            best = d;
            idx = c;
        }
    }
    return idx;
}

DftFrame build_frame(int n, int redundancy) {
    if (n < 2) throw std::invalid_argument("build_frame: signal length must be >= 2");
    if (redundancy < 1) throw std::invalid_argument("build_frame: redundancy must be >= 1");
    DftFrame f;
    f.n = n;
    f.redundancy = redundancy;
    f.p = n * redundancy;
    f.delta = 1.0 / static_cast<double>(f.p);
    f.atoms.resize(n, f.p);
    for (int idx = 0; idx < f.p; ++idx) f.atoms.col(idx) = atom(n, f.grid_frequency(idx));
    return f;
}

cvec atom(int n, const Frequency& omega) {
    if (n < 1) throw std::invalid_argument("atom: signal length must be >= 1");
    cvec d(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int t = 1; t <= n; ++t) {
        double phase = 2.0 * pi * omega.value * static_cast<double>(t);
        d[t - 1] = cx(std::cos(phase), std::sin(phase)) * scale;
    }
    return d;
}

double coherence(int n, const Frequency& w1, const Frequency& w2) {
    if (n < 1) throw std::invalid_argument("coherence: signal length must be >= 1");
    double delta = Frequency::wrap(w1.value - w2.value);
    if (delta == 0.0) return 1.0;
    double den = static_cast<double>(n) * std::sin(pi * delta);
    if (den == 0.0) return 1.0;  // delta an exact integer multiple of 1: identical atoms
    return std::abs(std::sin(pi * static_cast<double>(n) * delta) / den);
}

IndexSet coherence_band(const DftFrame& frame, const IndexSet& s, double eta) {
    if (eta < 0.0) throw std::invalid_argument("coherence_band: eta must be >= 0");
    std::vector<char> in_band(frame.p, 0);
    // kernel[m] = coherence between atoms m grid steps apart
    std::vector<double> kernel(frame.p);
    for (int m = 0; m < frame.p; ++m)
        kernel[m] = coherence(frame.n, Frequency(m * frame.delta), Frequency(0.0));
    for (int k : s) {
        if (k < 0 || k >= frame.p) throw std::out_of_range("coherence_band: index out of range");
        for (int i = 0; i < frame.p; ++i) {
            int m = i - k;
            if (m < 0) m += frame.p;
            if (kernel[m] > eta) in_band[i] = 1;
        }
    }
    IndexSet out;
    for (int i = 0; i < frame.p; ++i)
        if (in_band[i]) out.push_back(i);
    return out;
}

}  // namespace linespec
