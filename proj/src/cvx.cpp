#include "linespec/cvx.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace linespec {
namespace {

constexpr double kRankTol = 1e-13;

double sum_abs(const cvec& v) { return v.cwiseAbs().sum(); }

/// Largest singular value by power iteration on m^H m (deterministic start).
double spectral_norm(const cmat& m) {
    if (m.size() == 0) return 0.0;
    cvec v = cvec::Ones(m.cols());
    for (int i = 0; i < static_cast<int>(m.cols()); ++i) v[i] += cx(0.0, 1e-3 * (i % 7));
    v.normalize();
    double lam = 0.0;
    for (int i = 0; i < 60; ++i) {
        cvec w = m.adjoint() * (m * v);
        lam = w.norm();
        if (lam == 0.0) return 0.0;
        v = w / lam;
    }
    return std::sqrt(lam);
}

/// prox of t*||.||_1 (complex magnitude shrink, or real-nonnegative shrink).
void shrink(cvec& v, double t, AmplitudeDomain dom) {
    if (dom == AmplitudeDomain::complex_amplitudes) {
        for (int i = 0; i < v.size(); ++i) {
            double m = std::abs(v[i]);
            v[i] = (m <= t) ? cx(0.0, 0.0) : v[i] * (1.0 - t / m);
        }
    } else {
        for (int i = 0; i < v.size(); ++i) v[i] = cx(std::max(v[i].real() - t, 0.0), 0.0);
    }
}

/// Euclidean projection onto the chord cap {||(w1,q)|| <= r, w1 >= r cos_t}.
/// The cap is a solid of revolution about the w1 axis, so the same routine
/// projects in any dimension once q carries the norm of the transverse part.
void project_chord(double r, double cos_t, double sin_t, double& w1, double& q) {
    const double h = r * cos_t;
    const double r2 = r * r;
    if (w1 >= h && w1 * w1 + q * q <= r2) return;
    const double cb = std::max(w1, h);
    if (cb * cb + q * q <= r2) {
        w1 = cb;
        return;
    }
    const double n = std::hypot(w1, q);
    if (n > 0.0) {
        const double sb = r * w1 / n;
        if (sb >= h) {
            w1 = sb;
            q = r * q / n;
            return;
        }
    }
    w1 = h;
    q = (q >= 0.0 ? 1.0 : -1.0) * r * sin_t;
}

/// Shared problem state: arc triples compressed through the measurement
/// matrix, plus per-arc ratio variables zeta with beta = alpha.*zeta_b and
/// gamma = alpha.*zeta_g. The cone bounds ||(zeta_b, zeta_g)|| by r and the
/// arc-localization constraint lower-bounds Re(zeta_b), so the feasible
/// ratios form a chord cap: 4-D over (Re zb, Im zb, Re zg, Im zg) for
/// complex amplitudes, its 2-D real slice otherwise. Any zeta inside the cap
/// satisfies the per-arc constraints identically in alpha, so every iterate
/// both engines produce is feasible by construction. Rows of wz store
/// (Re zb, Im zb, Re zg, Im zg).
struct ArcWorkspace {
    const DftFrame* frame = nullptr;
    IndexSet arcs;
    cmat ac, au, av;  // M x J
    cmat phi3;        // [ac au av], fixed for the whole solve
    rvec theta, cos_t, sin_t;
    double r = 1.0;
    double width = 0.0;
    cvec y;
    int m = 0;
    int j = 0;

    cvec a;
    rmat wz;

    void project_row(rmat& z, int k) const {
        double w1 = z(k, 0);
        double q = std::sqrt(z(k, 1) * z(k, 1) + z(k, 2) * z(k, 2) + z(k, 3) * z(k, 3));
        const double q_in = q;
        project_chord(r, cos_t[k], sin_t[k], w1, q);
        z(k, 0) = w1;
        const double f = q_in > 0.0 ? q / q_in : 0.0;
        z(k, 1) *= f;
        z(k, 2) *= f;
        z(k, 3) *= f;
    }

    void init(const cvec& y_in, const rmat& a_mat, const IndexSet& arc_set, const DftFrame& f) {
        if (arc_set.empty()) throw std::invalid_argument("solve_polar: empty arc set");
        if (a_mat.cols() != f.n) throw std::invalid_argument("solve_polar: matrix/frame size mismatch");
        if (a_mat.rows() != y_in.size()) throw std::invalid_argument("solve_polar: matrix/measurement size mismatch");
        frame = &f;
        arcs = arc_set;
        y = y_in;
        m = static_cast<int>(a_mat.rows());
        j = static_cast<int>(arcs.size());
        CuvMatrices cuv = assemble_cuv(f, arcs);
        ac = real_complex_product(a_mat, cuv.c);
        au = real_complex_product(a_mat, cuv.u);
        av = real_complex_product(a_mat, cuv.v);
        phi3.resize(m, 3 * j);
        phi3 << ac, au, av;
        theta = cuv.theta;
        cos_t = theta.array().cos();
        sin_t = theta.array().sin();
        r = cuv.r;
        width = cuv.width;
        a = cvec::Zero(j);
        wz = rmat::Zero(j, 4);
        wz.col(0).setConstant(r);  // arc midpoint
    }

    void warm_start(const PolarSolution& s) {
        if (static_cast<int>(s.arcs.size()) != j || s.arcs != arcs)
            throw std::invalid_argument("solve_polar: warm start uses a different arc set");
        a = s.alpha;
        for (int k = 0; k < j; ++k) {
            const double aa2 = std::norm(a[k]);
            if (aa2 > 0.0) {
                const cx zb = s.beta[k] * std::conj(a[k]) / aa2;
                const cx zg = s.gamma[k] * std::conj(a[k]) / aa2;
                wz(k, 0) = zb.real();
                wz(k, 1) = zb.imag();
                wz(k, 2) = zg.real();
                wz(k, 3) = zg.imag();
            } else {
                wz(k, 0) = r;
                wz(k, 1) = wz(k, 2) = wz(k, 3) = 0.0;
            }
            project_row(wz, k);
        }
    }

    cvec stack(const cvec& al, const rmat& z) const {
        cvec xi(3 * j);
        xi.head(j) = al;
        for (int k = 0; k < j; ++k) {
            xi[j + k] = al[k] * cx(z(k, 0), z(k, 1));
            xi[2 * j + k] = al[k] * cx(z(k, 2), z(k, 3));
        }
        return xi;
    }

    cmat phi() const {
        cmat p = ac;
        for (int k = 0; k < j; ++k)
            p.col(k) += cx(wz(k, 0), wz(k, 1)) * au.col(k) + cx(wz(k, 2), wz(k, 3)) * av.col(k);
        return p;
    }

    PolarSolution package() const {
        PolarSolution s;
        s.arcs = arcs;
        s.centers.reserve(arcs.size());
        for (int p : arcs) s.centers.push_back(frame->grid_frequency(p));
        s.alpha = a;
        s.beta.resize(j);
        s.gamma.resize(j);
        for (int k = 0; k < j; ++k) {
            s.beta[k] = a[k] * cx(wz(k, 0), wz(k, 1));
            s.gamma[k] = a[k] * cx(wz(k, 2), wz(k, 3));
        }
        s.theta = theta;
        s.width = width;
        s.r = r;
        return s;
    }
};

double constraint_violation(const PolarSolution& s, AmplitudeDomain dom, double tau) {
    double v = 0.0;
    for (int k = 0; k < s.alpha.size(); ++k) {
        const double aa = std::abs(s.alpha[k]);
        const double bg = std::hypot(std::abs(s.beta[k]), std::abs(s.gamma[k]));
        v = std::max(v, bg - s.r * aa);
        const double cos_comp = (s.beta[k] * std::conj(s.alpha[k])).real() / std::max(aa, tau);
        v = std::max(v, s.r * std::cos(s.theta[k]) * aa - cos_comp);
        if (dom == AmplitudeDomain::real_nonnegative) {
            v = std::max(v, std::abs(s.alpha[k].imag()));
            v = std::max(v, -s.alpha[k].real());
            v = std::max(v, std::abs(s.beta[k].imag()));
            v = std::max(v, std::abs(s.gamma[k].imag()));
            v = std::max(v, s.beta[k].real() - s.r * aa);
        }
    }
    return std::max(v, 0.0);
}

// ---------------------------------------------------------------------------
// Per-arc proximal map. Both engines take gradient or consensus steps in the
// stacked physical coordinates (alpha, beta, gamma) and then pull each arc
// back onto its feasible set by solving
//   min over alpha, (zb,zg) in the chord cap:
//     1/2|alpha - a0|^2 + 1/2|alpha zb - b0|^2 + 1/2|alpha zg - g0|^2
//     + lam |alpha|
// by exact coordinate minimization: the alpha step is a shrink, the zeta
// step is a cap projection of the least-squares ratios. Warm-starting the
// alternation from the current zeta makes the output no worse than the
// incoming point, which is what the monotonicity argument of the penalized
// engine needs.
// ---------------------------------------------------------------------------

cx prox_alpha_step(cx a0, cx b0, cx g0, cx zb, cx zg, double lam, AmplitudeDomain dom) {
    const cx s = a0 + std::conj(zb) * b0 + std::conj(zg) * g0;
    const double denom = 1.0 + std::norm(zb) + std::norm(zg);
    if (dom == AmplitudeDomain::complex_amplitudes) {
        const double sm = std::abs(s);
        const double mag = std::max(sm - lam, 0.0) / denom;
        return (mag > 0.0 && sm > 0.0) ? s * (mag / sm) : cx(0.0, 0.0);
    }
    const double mag = std::max(s.real() - lam, 0.0) / denom;
    return cx(mag, 0.0);
}

void prox_arcs(const ArcWorkspace& w, const cvec& target, double lam, AmplitudeDomain dom,
               cvec& alpha, rmat& wz) {
    const int j = w.j;
    const bool cpx = dom == AmplitudeDomain::complex_amplitudes;
    alpha.resize(j);
    for (int k = 0; k < j; ++k) {
        const cx a0 = target[k];
        const cx b0 = target[j + k];
        const cx g0 = target[2 * j + k];
        cx zb(wz(k, 0), cpx ? wz(k, 1) : 0.0);
        cx zg(wz(k, 2), cpx ? wz(k, 3) : 0.0);
        for (int it = 0; it < 8; ++it) {
            const cx al = prox_alpha_step(a0, b0, g0, zb, zg, lam, dom);
            const double m2 = std::norm(al);
            if (m2 <= 0.0) break;
            cx nb = std::conj(al) * b0 / m2;
            cx ng = std::conj(al) * g0 / m2;
            if (!cpx) {
                nb = cx(nb.real(), 0.0);
                ng = cx(ng.real(), 0.0);
            }
            double w1 = nb.real();
            double q = std::sqrt(nb.imag() * nb.imag() + std::norm(ng));
            const double q_in = q;
            project_chord(w.r, w.cos_t[k], w.sin_t[k], w1, q);
            const double f = q_in > 0.0 ? q / q_in : 0.0;
            nb = cx(w1, nb.imag() * f);
            ng *= f;
            const bool settled = std::abs(nb - zb) + std::abs(ng - zg) <=
                                 1e-13 * (1.0 + std::abs(zb) + std::abs(zg));
            zb = nb;
            zg = ng;
            if (settled) break;
        }
        alpha[k] = prox_alpha_step(a0, b0, g0, zb, zg, lam, dom);
        wz(k, 0) = zb.real();
        wz(k, 1) = zb.imag();
        wz(k, 2) = zg.real();
        wz(k, 3) = zg.imag();
    }
}

// ---------------------------------------------------------------------------
// Penalized mode: minimize ||y - Phi3 xi||^2/(2 sigma^2) + ||alpha||_1 over
// arc-feasible xi by monotone proximal gradient with FISTA extrapolation.
// Internally the objective is scaled by sigma^2 (1/2 ||res||^2 +
// sigma^2 ||alpha||_1) so tiny sigmas do not push the numbers near overflow;
// the reported trace divides the scale back out. A momentum step is accepted
// only if it decreases the objective, otherwise a plain proximal step from
// the current iterate is taken, so the trace is non-increasing.
// ---------------------------------------------------------------------------

void run_penalized(ArcWorkspace& w, const SolverOptions& opts, double sigma, ConvergenceReport& rep) {
    const int stall_limit = 5;
    const double s2 = sigma * sigma;
    const double inv_s2 = 1.0 / s2;
    const double tol = std::max(opts.tolerance, 1e-15);

    auto objective = [&](const cvec& xi, const cvec& al) {
        return 0.5 * (w.phi3 * xi - w.y).squaredNorm() + s2 * sum_abs(al);
    };

    double lip = spectral_norm(w.phi3);
    lip = lip * lip * 1.01 + 1e-300;
    double step = 1.0 / lip;

    cvec alpha = w.a;
    rmat wz = w.wz;
    cvec x = w.stack(alpha, wz);
    cvec x_prev = x;
    cvec yv = x;
    double fx = objective(x, alpha);
    rep.objective_trace.push_back(fx * inv_s2);

    double t = 1.0;
    int stall = 0;
    bool converged = false;
    while (rep.iterations < opts.max_iterations) {
        const double fx_old = fx;

        // candidate from the extrapolated point
        cvec grad = w.phi3.adjoint() * (w.phi3 * yv - w.y);
        cvec al_c = alpha;
        rmat wz_c = wz;
        prox_arcs(w, yv - step * grad, step * s2, opts.domain, al_c, wz_c);
        cvec x_c = w.stack(al_c, wz_c);
        double fc = objective(x_c, al_c);

        bool from_momentum = true;
        if (fc > fx) {
            // fall back to a plain proximal step from x; this decreases the
            // objective whenever step <= 1/L, so halve on the rare failure
            from_momentum = false;
            grad = w.phi3.adjoint() * (w.phi3 * x - w.y);
            for (int bt = 0; bt < 30; ++bt) {
                al_c = alpha;
                wz_c = wz;
                prox_arcs(w, x - step * grad, step * s2, opts.domain, al_c, wz_c);
                x_c = w.stack(al_c, wz_c);
                fc = objective(x_c, al_c);
                if (fc <= fx) break;
                step *= 0.5;
            }
        }

        ++rep.iterations;
        if (fc <= fx) {
            x_prev = x;
            x = x_c;
            alpha = al_c;
            wz = wz_c;
            fx = fc;
        }
        rep.objective_trace.push_back(fx * inv_s2);

        if (from_momentum) {
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            yv = x + ((t - 1.0) / t_next) * (x - x_prev);
            t = t_next;
        } else {
            t = 1.0;
            yv = x;
        }

        stall = (fx_old - fx <= tol * std::max(std::abs(fx), 1e-300)) ? stall + 1 : 0;
        if (stall >= stall_limit) {
            converged = true;
            break;
        }
    }

    w.a = alpha;
    w.wz = wz;
    rep.objective = rep.objective_trace.back();
    rep.converged = converged;
    rep.status = converged ? SolveStatus::converged : SolveStatus::max_iterations;
}

// ---------------------------------------------------------------------------
// Constrained mode: minimize ||alpha||_1 s.t. ||y - Phi3 xi|| <= eps over
// arc-feasible xi. Operator splitting: the x-side is the exact projection
// onto the residual ball (eigendecomposition of Phi3 Phi3^H plus a 1-D
// secular equation, computed once since Phi3 is fixed), the z-side is the
// per-arc prox above. The z iterates are always arc-feasible; the best one
// seen (ball-feasible with least l1 if any, otherwise least residual) is
// returned, so the solution never mixes amplitudes and arc variables from
// different iterations.
// ---------------------------------------------------------------------------

/// Exact Euclidean projection onto {x : ||phi x - y|| <= eps}.
struct BallProjector {
    cmat u_basis;  // M x rank (left singular vectors for nonzero singular values)
    cmat v_basis;  // cols(phi) x rank
    rvec s;        // singular values, length rank
    cvec b;        // u_basis^H y
    double y_perp = 0.0;   // distance from y to the column span: residual floor
    double eps2_eff = 0.0; // in-span residual budget
    bool exact_fit = false;

    void init(const cmat& phi, const cvec& y) {
        const cmat gram = phi * phi.adjoint();  // M x M
        Eigen::SelfAdjointEigenSolver<cmat> eig(gram);
        const rvec evals = eig.eigenvalues();
        const double emax = std::max(evals.cwiseAbs().maxCoeff(), 0.0);
        const double cut = std::max(emax * kRankTol * kRankTol, 0.0);
        std::vector<int> keep;
        for (int i = 0; i < evals.size(); ++i)
            if (evals[i] > cut && evals[i] > 0.0) keep.push_back(i);
        const int rank = static_cast<int>(keep.size());
        u_basis.resize(phi.rows(), rank);
        s.resize(rank);
        for (int i = 0; i < rank; ++i) {
            u_basis.col(i) = eig.eigenvectors().col(keep[i]);
            s[i] = std::sqrt(evals[keep[i]]);
        }
        v_basis.resize(phi.cols(), rank);
        for (int i = 0; i < rank; ++i) v_basis.col(i) = (phi.adjoint() * u_basis.col(i)) / s[i];
        b = u_basis.adjoint() * y;
        // direct subtraction: the squared-norm difference cancels catastrophically
        y_perp = (y - u_basis * b).norm();
    }

    void set_radius(double eps) {
        eps2_eff = std::max(eps * eps - y_perp * y_perp, 0.0);
        exact_fit = eps2_eff <= 1e-300;
    }

    cvec project(const cvec& v) const {
        const cvec d = v_basis.adjoint() * v;
        cvec c(s.size());
        if (exact_fit) {
            // limit of the secular equation: interpolate the in-span part of y
            for (int i = 0; i < s.size(); ++i) c[i] = b[i] / s[i];
            return v + v_basis * (c - d);
        }
        rvec rho(s.size());
        double r0 = 0.0;
        for (int i = 0; i < s.size(); ++i) {
            rho[i] = std::abs(s[i] * d[i] - b[i]);
            r0 += rho[i] * rho[i];
        }
        if (r0 <= eps2_eff) return v;
        auto resid2 = [&](double lam) {
            double acc = 0.0;
            for (int i = 0; i < s.size(); ++i) {
                const double den = 1.0 + lam * s[i] * s[i];
                acc += rho[i] * rho[i] / (den * den);
            }
            return acc;
        };
        double lo = 0.0, hi = 1.0;
        bool bracketed = false;
        for (int i = 0; i < 2000; ++i) {
            if (resid2(hi) <= eps2_eff) {
                bracketed = true;
                break;
            }
            lo = hi;
            hi *= 2.0;
            if (!(hi < 1e290)) break;
        }
        if (!bracketed) {
            for (int i = 0; i < s.size(); ++i) c[i] = b[i] / s[i];
            return v + v_basis * (c - d);
        }
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (resid2(mid) > eps2_eff)
                lo = mid;
            else
                hi = mid;
        }
        const double lam = hi;
        for (int i = 0; i < s.size(); ++i) c[i] = (d[i] + lam * s[i] * b[i]) / (1.0 + lam * s[i] * s[i]);
        return v + v_basis * (c - d);
    }
};

void run_constrained(ArcWorkspace& w, const SolverOptions& opts, ConvergenceReport& rep) {
    const double eps = opts.epsilon;
    const int n3 = 3 * w.j;

    if (w.y.norm() <= eps) {
        w.a.setZero();
        rep.converged = true;
        rep.status = SolveStatus::converged;
        return;  // alpha = 0 is optimal
    }

    BallProjector proj;
    proj.init(w.phi3, w.y);
    if (proj.y_perp > eps + opts.feasibility_tol) {
        rep.status = SolveStatus::infeasible;
        rep.residual_norm = proj.y_perp;
        return;
    }
    proj.set_radius(eps);

    cvec alpha = w.a;
    rmat wz = w.wz;
    cvec z = w.stack(alpha, wz);
    cvec u = cvec::Zero(n3);
    double rho = 1.0;

    // best arc-feasible iterate: ball-feasible with least l1 beats everything,
    // otherwise least residual (l1 breaks near-ties)
    const double feas_cut = eps + 0.5 * opts.feasibility_tol;
    struct Best {
        cvec alpha;
        rmat wz;
        double resid = std::numeric_limits<double>::infinity();
        double l1 = std::numeric_limits<double>::infinity();
        bool feasible = false;
        bool set = false;
    } best;
    auto consider = [&](const cvec& al, const rmat& wzv, const cvec& zi) {
        const double resid = (w.phi3 * zi - w.y).norm();
        const double l1 = sum_abs(al);
        const bool feas = resid <= feas_cut;
        bool better;
        if (!best.set)
            better = true;
        else if (feas != best.feasible)
            better = feas;
        else if (feas)
            better = l1 < best.l1 * (1.0 - 1e-12);
        else
            better = resid < best.resid * (1.0 - 1e-12) ||
                     (resid <= best.resid * (1.0 + 1e-9) && l1 < best.l1 * (1.0 - 1e-12));
        if (better) {
            best.alpha = al;
            best.wz = wzv;
            best.resid = resid;
            best.l1 = l1;
            best.feasible = feas;
            best.set = true;
        }
    };
    consider(alpha, wz, z);

    const double tol_rel = std::max(opts.tolerance, 1e-10);
    const double tol_abs = 1e-14 * std::sqrt(static_cast<double>(n3)) * std::max(1.0, w.y.norm());
    const double stall_tol = std::max(opts.tolerance, 1e-9);
    const int window = 250;
    double snap_resid = best.resid;
    double snap_l1 = best.l1;
    bool snap_feas = best.feasible;
    bool converged = false;

    while (rep.iterations < opts.max_iterations) {
        const cvec x = proj.project(z - u);
        const cvec z_old = z;
        cvec al_c = alpha;
        rmat wz_c = wz;
        prox_arcs(w, x + u, 1.0 / rho, opts.domain, al_c, wz_c);
        alpha = al_c;
        wz = wz_c;
        z = w.stack(alpha, wz);
        u += x - z;
        ++rep.iterations;
        consider(alpha, wz, z);

        const double rp = (x - z).norm();
        const double rd = rho * (z - z_old).norm();
        const double sp = std::max(x.norm(), z.norm());
        const double sd = rho * u.norm();
        if (rp <= tol_abs + tol_rel * std::max(sp, 1e-300) &&
            rd <= tol_abs + tol_rel * std::max(sd, 1e-300)) {
            converged = true;
            break;
        }
        if (rep.iterations % window == 0) {
            // no progress on the best iterate over a whole window: the
            // consensus gap has hit the arc-model floor, stop early
            const bool improved =
                (best.feasible != snap_feas) ||
                (best.feasible ? best.l1 <= snap_l1 * (1.0 - stall_tol)
                               : best.resid <= snap_resid * (1.0 - stall_tol));
            if (!improved) {
                converged = best.feasible;
                break;
            }
            snap_resid = best.resid;
            snap_l1 = best.l1;
            snap_feas = best.feasible;
        }
        if (rep.iterations % 10 == 0) {
            if (rp > 10.0 * rd) {
                rho *= 2.0;
                u *= 0.5;
            } else if (rd > 10.0 * rp) {
                rho *= 0.5;
                u *= 2.0;
            }
        }
    }

    w.a = best.alpha;
    w.wz = best.wz;
    if (best.resid > eps + opts.feasibility_tol) {
        rep.status = SolveStatus::infeasible;
        rep.converged = false;
    } else {
        rep.converged = converged && best.feasible;
        rep.status = rep.converged ? SolveStatus::converged : SolveStatus::max_iterations;
    }
}

// ---------------------------------------------------------------------------
// Plain l1 ball-constrained solver (no arcs) used by solve_bpdn.
// ---------------------------------------------------------------------------

struct AdmmResult {
    cvec x;
    int iterations = 0;
    bool converged = false;
    bool reachable = true;
};

AdmmResult admm_l1_ball(const cmat& phi, const cvec& y, double eps, AmplitudeDomain dom,
                        double tol_rel, int max_iter, double feas_slack) {
    AdmmResult out;
    const int n = static_cast<int>(phi.cols());
    BallProjector proj;
    proj.init(phi, y);
    if (proj.y_perp > eps + feas_slack) {
        out.x = cvec::Zero(n);
        out.reachable = false;
        return out;
    }
    proj.set_radius(eps);
    cvec z = cvec::Zero(n);
    cvec u = cvec::Zero(n);
    double rho = 1.0;
    const double tol_abs = 1e-14 * std::sqrt(static_cast<double>(n));
    cvec x = proj.project(z - u);
    for (int it = 0; it < max_iter; ++it) {
        const cvec z_old = z;
        z = x + u;
        shrink(z, 1.0 / rho, dom);
        u += x - z;
        const double rp = (x - z).norm();
        const double rd = rho * (z - z_old).norm();
        ++out.iterations;
        const double sp = std::max(x.norm(), z.norm());
        const double sd = rho * u.norm();
        if (rp <= tol_abs + tol_rel * std::max(sp, 1e-300) && rd <= tol_abs + tol_rel * std::max(sd, 1e-300)) {
            out.converged = true;
            break;
        }
        if ((it + 1) % 10 == 0) {
            if (rp > 10.0 * rd) {
                rho *= 2.0;
                u *= 0.5;
            } else if (rd > 10.0 * rp) {
                rho *= 0.5;
                u *= 2.0;
            }
        }
        x = proj.project(z - u);
    }
    out.x = (dom == AmplitudeDomain::real_nonnegative) ? z : x;
    return out;
}

}  // namespace

std::pair<PolarSolution, ConvergenceReport> solve_polar(const cvec& y, const rmat& a,
                                                        const IndexSet& arcs, const DftFrame& frame,
                                                        const SolverOptions& opts,
                                                        const PolarSolution* init) {
    ArcWorkspace w;
    w.init(y, a, arcs, frame);
    if (init != nullptr) w.warm_start(*init);
    ConvergenceReport rep;

    if (opts.mode == SolveMode::penalized) {
        double sigma = opts.sigma;
        if (sigma <= 0.0) sigma = std::max(opts.epsilon, 1e-12) / std::sqrt(static_cast<double>(w.m));
        run_penalized(w, opts, sigma, rep);
    } else {
        if (opts.epsilon < 0.0) throw std::invalid_argument("solve_polar: negative epsilon");
        run_constrained(w, opts, rep);
    }

    PolarSolution sol = w.package();
    rep.objective = (opts.mode == SolveMode::penalized && !rep.objective_trace.empty())
                        ? rep.objective_trace.back()
                        : sum_abs(sol.alpha);
    rep.residual_norm = (w.phi() * w.a - y).norm();
    rep.max_constraint_violation = constraint_violation(sol, opts.domain, opts.tau);
    return {std::move(sol), rep};
}

cvec solve_bpdn(const cvec& y, const cmat& phi, double epsilon, const SolverOptions& opts,
                ConvergenceReport* report) {
    if (phi.rows() != y.size()) throw std::invalid_argument("solve_bpdn: dimension mismatch");
    if (epsilon < 0.0) throw std::invalid_argument("solve_bpdn: negative epsilon");
    if (y.norm() <= epsilon) {
        // zero is feasible and has the smallest possible objective
        if (report) {
            *report = ConvergenceReport{};
            report->status = SolveStatus::converged;
            report->converged = true;
            report->residual_norm = y.norm();
        }
        return cvec::Zero(phi.cols());
    }
    const double tol = std::max(opts.tolerance, 1e-10);
    AdmmResult res =
        admm_l1_ball(phi, y, epsilon, opts.domain, tol, opts.max_iterations, opts.feasibility_tol);
    if (!res.reachable) throw std::runtime_error("solve_bpdn: epsilon below the least-squares residual floor");
    if (report) {
        report->status = res.converged ? SolveStatus::converged : SolveStatus::max_iterations;
        report->converged = res.converged;
        report->iterations = res.iterations;
        report->objective = sum_abs(res.x);
        report->residual_norm = (phi * res.x - y).norm();
        report->max_constraint_violation =
            std::max(0.0, report->residual_norm - epsilon);
    }
    return res.x;
}

}  // namespace linespec
