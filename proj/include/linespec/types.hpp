#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

namespace linespec {

using cx = std::complex<double>;
using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;
using rvec = Eigen::VectorXd;
using rmat = Eigen::MatrixXd;

using IndexSet = std::vector<int>;

/// Normalized frequency on the unit circle, stored in [0, 1).
struct Frequency {
    double value = 0.0;

    Frequency() = default;
    explicit Frequency(double v) : value(wrap(v)) {}

    /// Map any real to its representative in [0, 1).
    static double wrap(double v) {
        double w = v - std::floor(v);
        if (w >= 1.0) w -= 1.0;  // guards v = -1e-18 rounding to 1.0
        return w;
    }

    /// Position in DFT bins for a length-N signal.
    double bins(int n) const { return value * n; }
};

/// Product of a real matrix with a complex matrix/vector (two real GEMMs;
/// Eigen does not mix scalar types).
inline cmat real_complex_product(const rmat& a, const cmat& z) {
    cmat out(a.rows(), z.cols());
    out.real() = a * z.real();
    out.imag() = a * z.imag();
    return out;
}

inline cvec real_complex_product(const rmat& a, const cvec& z) {
    cvec out(a.rows());
    out.real() = a * z.real();
    out.imag() = a * z.imag();
    return out;
}

/// Circular distance on the unit interval, in [0, 1/2].
inline double circular_distance(double a, double b) {
    double d = std::abs(Frequency::wrap(a) - Frequency::wrap(b));
    return std::min(d, 1.0 - d);
}

inline double circular_distance(const Frequency& a, const Frequency& b) {
    return circular_distance(a.value, b.value);
}

}  // namespace linespec
