#include "linespec/baselines.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace linespec {

cvec l1_synthesis_recover(const cvec& y, const rmat& a, const DftFrame& frame, double epsilon,
                          const SolverOptions& opts, ConvergenceReport* report) {
    if (a.cols() != frame.n) throw std::invalid_argument("l1_synthesis_recover: matrix/frame mismatch");
    if (a.rows() != y.size()) throw std::invalid_argument("l1_synthesis_recover: matrix/measurement mismatch");
    const cmat phi = real_complex_product(a, frame.atoms);
    const cvec x = solve_bpdn(y, phi, epsilon, opts, report);
    return frame.atoms * x;
}

namespace {

/// Null spectrum ||E_n^H e(omega)||^2 for the steering vector at omega.
double null_spectrum(const cmat& noise_basis, double omega) {
    const int l = static_cast<int>(noise_basis.rows());
    cvec e(l);
    for (int t = 0; t < l; ++t)
        e[t] = std::polar(1.0, 2.0 * std::numbers::pi * omega * t);
    return (noise_basis.adjoint() * e).squaredNorm();
}

}  // namespace

MusicResult music_frequencies(const cvec& f_hat, const MusicConfig& cfg) {
    const int n = static_cast<int>(f_hat.size());
    if (n < 3) throw std::invalid_argument("music_frequencies: signal too short");
    if (f_hat.norm() == 0.0) throw std::invalid_argument("music_frequencies: zero signal");
    if (cfg.peaks < 1) throw std::invalid_argument("music_frequencies: peaks must be positive");
    const int l = cfg.subvector_length > 0 ? cfg.subvector_length : n / 2;
    if (l <= cfg.peaks || l > n - 1)
        throw std::invalid_argument("music_frequencies: window length must lie in [peaks+1, n-1]");
    if (cfg.grid_refinement < 1)
        throw std::invalid_argument("music_frequencies: grid_refinement must be positive");
    const int base = cfg.base_grid > 0 ? cfg.base_grid : 5 * n;
    const int grid = base * cfg.grid_refinement;

    // Forward-backward averaged sample covariance from all length-L windows.
    const int windows = n - l + 1;
    cmat cov = cmat::Zero(l, l);
    for (int i = 0; i < windows; ++i) {
        const cvec w = f_hat.segment(i, l);
        cov.noalias() += w * w.adjoint();
    }
    cov /= static_cast<double>(windows);
    cmat back(l, l);
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < l; ++j) back(i, j) = std::conj(cov(l - 1 - i, l - 1 - j));
    cov = 0.5 * (cov + back);

    Eigen::SelfAdjointEigenSolver<cmat> eig(cov);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("music_frequencies: eigendecomposition failed");
    // eigenvalues ascend, so the noise subspace is the leading block
    const cmat noise_basis = eig.eigenvectors().leftCols(l - cfg.peaks);

    rvec q(grid);
    for (int i = 0; i < grid; ++i)
        q[i] = null_spectrum(noise_basis, static_cast<double>(i) / grid);

    // Local minima of the null spectrum, i.e. local maxima of the pseudospectrum.
    std::vector<int> minima;
    for (int i = 0; i < grid; ++i) {
        const double prev = q[(i + grid - 1) % grid];
        const double next = q[(i + 1) % grid];
        if (q[i] < prev && q[i] <= next) minima.push_back(i);
    }
    std::stable_sort(minima.begin(), minima.end(), [&](int i, int j) { return q[i] < q[j]; });

    // Greedy pick, deepest first, keeping peaks one base grid step apart.
    const double min_gap = 1.0 / base;
    std::vector<int> picked;
    for (int i : minima) {
        if (static_cast<int>(picked.size()) == cfg.peaks) break;
        const double wi = static_cast<double>(i) / grid;
        bool clear = true;
        for (int j : picked)
            if (circular_distance(wi, static_cast<double>(j) / grid) < min_gap) {
                clear = false;
                break;
            }
        if (clear) picked.push_back(i);
    }

    MusicResult result;
    result.complete = static_cast<int>(picked.size()) == cfg.peaks;
    for (int i : picked) {
        const double qm = q[(i + grid - 1) % grid];
        const double qp = q[(i + 1) % grid];
        const double curvature = qm - 2.0 * q[i] + qp;
        double shift = 0.0;
        if (curvature > 0.0) shift = std::clamp(0.5 * (qm - qp) / curvature, -0.5, 0.5);
        const double q_vertex = std::max(q[i] - 0.25 * (qm - qp) * shift, 1e-300);
        MusicPeak peak;
        peak.frequency.value = Frequency::wrap((i + shift) / grid);
        peak.height = 1.0 / q_vertex;
        result.peaks.push_back(peak);
    }
    std::stable_sort(result.peaks.begin(), result.peaks.end(),
                     [](const MusicPeak& a, const MusicPeak& b) { return a.height > b.height; });
    if (!result.peaks.empty()) {
        const double top = result.peaks.front().height;
        for (auto& p : result.peaks) p.weak = p.height < 1e-6 * top;
    }
    return result;
}

}  // namespace linespec
