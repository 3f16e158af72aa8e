#include "linespec/polar.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace linespec {

PolarTriple polar_triple(const DftFrame& frame, int p) {
    if (p < 0 || p >= frame.p) throw std::out_of_range("polar_triple: grid index out of range");
    PolarTriple t;
    t.center = frame.grid_frequency(p);
    t.width = frame.delta;
    t.r = 1.0;  // unit-norm atoms

    const cvec d0 = atom(frame.n, t.center);
    const cvec dm = atom(frame.n, Frequency(t.center.value - 0.5 * t.width));
    const cvec dp = atom(frame.n, Frequency(t.center.value + 0.5 * t.width));

    double cos_theta = (d0.adjoint() * dm)(0).real() / (t.r * t.r);
    cos_theta = std::clamp(cos_theta, -1.0, 1.0);
    t.theta = std::acos(cos_theta);
    if (t.theta < 1e-9) throw std::runtime_error("polar_triple: degenerate arc (theta ~ 0)");

    // Invert the node system
    //   d(-) = c + r cos(theta) u - r sin(theta) v
    //   d(0) = c + r u
    //   d(+) = c + r cos(theta) u + r sin(theta) v
    const double s = std::sin(t.theta);
    t.u = (d0 - 0.5 * (dp + dm)) / (t.r * (1.0 - cos_theta));
    t.v = (dp - dm) / (2.0 * t.r * s);
    t.c = d0 - t.r * t.u;
    return t;
}

CuvMatrices assemble_cuv(const DftFrame& frame, const IndexSet& arcs) {
    if (arcs.empty()) throw std::invalid_argument("assemble_cuv: empty arc set");
    std::set<int> seen;
    for (int p : arcs)
        if (!seen.insert(p).second) throw std::invalid_argument("assemble_cuv: duplicate arc index");

    const int j = static_cast<int>(arcs.size());
    CuvMatrices m;
    m.c.resize(frame.n, j);
    m.u.resize(frame.n, j);
    m.v.resize(frame.n, j);
    m.theta.resize(j);
    m.width = frame.delta;
    for (int k = 0; k < j; ++k) {
        PolarTriple t = polar_triple(frame, arcs[k]);
        m.c.col(k) = t.c;
        m.u.col(k) = t.u;
        m.v.col(k) = t.v;
        m.theta[k] = t.theta;
        m.r = t.r;
    }
    return m;
}

cvec synthesize(const DftFrame& frame, const PolarSolution& sol) {
    const int j = static_cast<int>(sol.arcs.size());
    if (sol.alpha.size() != j || sol.beta.size() != j || sol.gamma.size() != j)
        throw std::invalid_argument("synthesize: coefficient/arc length mismatch");
    if (j == 0) return cvec::Zero(frame.n);
    CuvMatrices m = assemble_cuv(frame, sol.arcs);
    return m.c * sol.alpha + m.u * sol.beta + m.v * sol.gamma;
}

PolarSolution rescale(const PolarSolution& sol) {
    PolarSolution out = sol;
    const int j = static_cast<int>(sol.alpha.size());
    for (int k = 0; k < j; ++k) {
        double target = out.r * std::abs(out.alpha[k]);
        double norm = std::hypot(std::abs(out.beta[k]), std::abs(out.gamma[k]));
        if (norm > 0.0) {
            out.beta[k] *= target / norm;
            out.gamma[k] *= target / norm;
        } else {
            out.beta[k] = cx(target, 0.0);
            out.gamma[k] = cx(0.0, 0.0);
        }
    }
    return out;
}

std::vector<RecoveredLine> recover_frequencies(const PolarSolution& sol) {
    const int j = static_cast<int>(sol.alpha.size());
    if (static_cast<int>(sol.arcs.size()) != j || sol.theta.size() != j ||
        static_cast<int>(sol.centers.size()) != j)
        throw std::invalid_argument("recover_frequencies: inconsistent solution");
    std::vector<RecoveredLine> lines;
    lines.reserve(j);
    for (int k = 0; k < j; ++k) {
        if (std::abs(sol.alpha[k]) == 0.0) continue;
        const cx ac = std::conj(sol.alpha[k]);
        double phi = std::atan2((sol.gamma[k] * ac).real(), (sol.beta[k] * ac).real());
        phi = std::clamp(phi, -sol.theta[k], sol.theta[k]);
        RecoveredLine ln;
        ln.frequency = Frequency(sol.centers[k].value + 0.5 * sol.width * phi / sol.theta[k]);
        ln.amplitude = sol.alpha[k];
        ln.arc = sol.arcs[k];
        lines.push_back(ln);
    }
    std::stable_sort(lines.begin(), lines.end(), [](const RecoveredLine& a, const RecoveredLine& b) {
        return std::abs(a.amplitude) > std::abs(b.amplitude);
    });
    return lines;
}

}  // namespace linespec
