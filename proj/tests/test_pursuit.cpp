#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "linespec/frame.hpp"
#include "linespec/metrics.hpp"
#include "linespec/pursuit.hpp"
#include "linespec/sigmodel.hpp"
#include "test_util.hpp"

using namespace linespec;

namespace {

double matched_bins(const std::vector<Frequency>& truth, const std::vector<Frequency>& est,
                    int n) {
    return hungarian_match(truth, est, n).mean_error;
}

double min_pairwise_gap(const std::vector<Frequency>& freqs) {
    double gap = 1.0;
    for (size_t i = 0; i < freqs.size(); ++i)
        for (size_t j = i + 1; j < freqs.size(); ++j)
            gap = std::min(gap, circular_distance(freqs[i], freqs[j]));
    return gap;
}

bool same_frequencies(const LineEstimate& a, const LineEstimate& b) {
    if (a.frequencies.size() != b.frequencies.size()) return false;
    for (size_t i = 0; i < a.frequencies.size(); ++i)
        if (a.frequencies[i].value != b.frequencies[i].value) return false;
    return true;
}

}  // namespace

TEST_SUITE("pursuit") {

TEST_CASE("correlation_select picks the aligned atom and honors the band") {
    const int n = 100, c = 5;
    const DftFrame fr = build_frame(n, c);
    const rmat a = subsample_matrix(n, n, 2);
    const cmat phi = real_complex_product(a, fr.atoms);

    const int j = 237;
    const cvec y = phi.col(j) * cx(0.3, -2.0);
    CHECK(correlation_select(y, phi, {}, fr, 0.25) == j);

    // with j's band excluded the winner must sit outside it
    const int alt = correlation_select(y, phi, {j}, fr, 0.25);
    CHECK(alt >= 0);
    const int d = std::abs(alt - j);
    CHECK(std::min(d, fr.p - d) > 3);

    CHECK_THROWS_AS(correlation_select(cvec::Ones(3), phi, {}, fr, 0.25), std::invalid_argument);
    CHECK_THROWS_AS(correlation_select(y, phi.leftCols(10), {}, fr, 0.25), std::invalid_argument);
}

TEST_CASE("correlation_select reports exhaustion") {
    // n=3, c=3: integer-bin offsets (multiples of 3) are exactly orthogonal and
    // never banned, so each index's band covers everything except the other two
    // members of its coset. Two picks leave exactly one candidate; three picks
    // blanket the grid.
    const DftFrame fr = build_frame(3, 3);
    const rmat a = subsample_matrix(3, 3, 3);
    const cmat phi = real_complex_product(a, fr.atoms);
    CHECK(correlation_select(phi.col(6), phi, {0, 3}, fr, 0.25) == 6);
    CHECK(correlation_select(phi.col(1), phi, {0, 3, 6}, fr, 0.25) == -1);
}

TEST_CASE("bomp is exact for one on-grid tone at full sampling") {
    const int n = 100, c = 5, bin = 41;
    const DftFrame fr = build_frame(n, c);
    const rmat a = subsample_matrix(n, n, 4);
    const cvec f = testutil::single_tone(n, Frequency(bin / double(n)), cx(1.1, 0.7));
    const cvec y = real_complex_product(a, f);

    PursuitConfig cfg;
    cfg.k = 1;
    const LineEstimate est = bomp(y, a, fr, cfg);
    REQUIRE(est.frequencies.size() == 1);
    CHECK(circular_distance(est.frequencies[0].value, bin / double(n)) < 1e-12);
    CHECK((est.signal - f).norm() / f.norm() < 1e-10);
    CHECK(est.residual_norm < 1e-10 * y.norm());
}

TEST_CASE("bomp on-grid multi-tone recovery is exact in most compressed trials") {
    // On-grid exactness lives on the orthonormal DFT grid (c=1): with a
    // redundant frame the 0.935-coherence neighbors of a tone become
    // indistinguishable after 2x compression, so exact selection there is a
    // coin flip no matter the implementation.
    const int n = 100, k = 4, m = 50, trials = 5;
    const DftFrame fr = build_frame(n, 1);
    int exact = 0;
    for (int tr = 0; tr < trials; ++tr) {
        const testutil::OnGridTruth t = testutil::on_grid_signal(n, k, 1, 300 + tr);
        const rmat a = gaussian_matrix(m, n, 400 + tr);
        const cvec y = real_complex_product(a, t.signal);
        PursuitConfig cfg;
        cfg.k = k;
        const LineEstimate est = bomp(y, a, fr, cfg);
        if (est.frequencies.size() == size_t(k) &&
            matched_bins(t.frequencies, est.frequencies, n) < 1e-9)
            ++exact;
    }
    CHECK(exact >= 4);
}

TEST_CASE("bomp quantizes a half-step tone to a neighboring grid point") {
    const int n = 100, c = 5;
    const DftFrame fr = build_frame(n, c);
    const rmat a = subsample_matrix(n, n, 11);
    const double w = (123 + 0.5) / double(fr.p);  // halfway between grid points
    const cvec y = real_complex_product(a, testutil::single_tone(n, Frequency(w), 1.0));
    PursuitConfig cfg;
    cfg.k = 1;
    const LineEstimate est = bomp(y, a, fr, cfg);
    const double err = circular_distance(est.frequencies[0].value, w) * n;
    CHECK(err >= 0.1 - 1e-6);  // half a grid step, in bins
    CHECK(err <= 0.2 + 1e-6);
}

TEST_CASE("bomp residual trace decreases and matches the synthesis") {
    const int n = 100, k = 3, m = 60;
    const DftFrame fr = build_frame(n, 5);
    const testutil::OnGridTruth t = testutil::on_grid_signal(n, k, 5, 9);
    const rmat a = gaussian_matrix(m, n, 10);
    const cvec y = real_complex_product(a, t.signal);
    PursuitConfig cfg;
    cfg.k = k;
    const LineEstimate est = bomp(y, a, fr, cfg);
    REQUIRE(est.residual_trace.size() == size_t(k));
    for (size_t i = 1; i < est.residual_trace.size(); ++i)
        CHECK(est.residual_trace[i] <= est.residual_trace[i - 1] + 1e-12);
    CHECK(est.residual_trace.back() == doctest::Approx(est.residual_norm));
    const double recompute = (y - real_complex_product(a, est.signal)).norm();
    CHECK(recompute == doctest::Approx(est.residual_norm).epsilon(1e-9));
}

TEST_CASE("bomp throws when the band exclusion runs out of atoms") {
    // n=2, c=2: the band around any pick covers the two half-step neighbors
    // (coherence cos(pi/4) = 0.707), leaving only the opposite integer bin.
    // Two picks therefore blanket all four atoms, and a third selection has
    // nowhere to go. Three measurement rows keep k=3 past the k <= M check.
    const DftFrame fr = build_frame(2, 2);
    rmat a(3, 2);
    a << 1.0, 0.0, 0.0, 1.0, 1.0, 1.0;
    const cvec f = fr.atoms.col(0) * 2.0 + fr.atoms.col(2) * 1.5;
    const cvec y = real_complex_product(a, f);
    PursuitConfig cfg;
    cfg.k = 3;
    CHECK_THROWS_AS(bomp(y, a, fr, cfg), std::runtime_error);
}

TEST_CASE("pursuit input validation") {
    const DftFrame fr = build_frame(40, 5);
    const rmat a = gaussian_matrix(20, 40, 6);
    const cvec y = cvec::Ones(20);
    PursuitConfig cfg;
    cfg.k = 0;
    CHECK_THROWS_AS(bomp(y, a, fr, cfg), std::invalid_argument);
    cfg.k = 21;
    CHECK_THROWS_AS(bisp(y, a, fr, cfg), std::invalid_argument);
    cfg.k = 1;
    cfg.eta = 1.0;
    CHECK_THROWS_AS(cbp(y, a, fr, cfg), std::invalid_argument);
    cfg.eta = 0.25;
    CHECK_THROWS_AS(bomp(cvec::Ones(19), a, fr, cfg), std::invalid_argument);
    CHECK_THROWS_AS(bomp(y, gaussian_matrix(20, 41, 6), fr, cfg), std::invalid_argument);
}

TEST_CASE("cbp finds an on-grid tone to solver accuracy") {
    const int n = 50, c = 5, bin = 17;
    const DftFrame fr = build_frame(n, c);
    const rmat a = subsample_matrix(n, n, 7);
    const cvec y = real_complex_product(a, testutil::single_tone(n, Frequency(bin / double(n)), 1.3));
    PursuitConfig cfg;
    cfg.k = 1;
    const LineEstimate est = cbp(y, a, fr, cfg);
    REQUIRE(est.frequencies.size() == 1);
    CHECK(circular_distance(est.frequencies[0].value, bin / double(n)) * n < 1e-3);
}

TEST_CASE("cbp interpolates an off-grid tone below a hundredth of a bin") {
    const int n = 100, c = 5;
    const DftFrame fr = build_frame(n, c);
    const rmat a = subsample_matrix(n, n, 7);
    const double w = 37.3 / double(n);  // between grid points of the redundant frame
    const cvec y = real_complex_product(a, testutil::single_tone(n, Frequency(w), 1.0));
    PursuitConfig cfg;
    cfg.k = 1;
    const LineEstimate est = cbp(y, a, fr, cfg);
    REQUIRE(est.frequencies.size() == 1);
    CHECK(circular_distance(est.frequencies[0].value, w) * n < 1e-2);
    CHECK(est.residual_norm == doctest::Approx((y - real_complex_product(a, est.signal)).norm()));
}

TEST_CASE("bisp matches the grid answer for one on-grid tone") {
    const int n = 100, c = 5, bin = 73;
    const DftFrame fr = build_frame(n, c);
    const rmat a = gaussian_matrix(90, n, 13);
    const cvec y = real_complex_product(a, testutil::single_tone(n, Frequency(bin / double(n)), cx(0.5, 1.5)));
    PursuitConfig cfg;
    cfg.k = 1;
    const LineEstimate est = bisp(y, a, fr, cfg);
    REQUIRE(est.frequencies.size() == 1);
    CHECK(circular_distance(est.frequencies[0].value, bin / double(n)) * n < 1e-3);
}

TEST_CASE("bisp refines an off-grid tone well below the grid quantization") {
    const int n = 100, c = 5;
    const DftFrame fr = build_frame(n, c);
    const rmat a = gaussian_matrix(90, n, 123);
    const double w = 64.83 / double(n);
    const cvec y = real_complex_product(a, testutil::single_tone(n, Frequency(w), 1.0));
    PursuitConfig cfg;
    cfg.k = 1;
    const LineEstimate est = bisp(y, a, fr, cfg);
    REQUIRE(est.frequencies.size() == 1);
    CHECK(circular_distance(est.frequencies[0].value, w) * n < 1e-2);
    // never worse than its own grid-only start
    REQUIRE(!est.residual_trace.empty());
    CHECK(est.residual_norm <= est.residual_trace.front() + 1e-12);
}

TEST_CASE("bisp and cbp beat the grid bound on compressed multi-tone data") {
    const int n = 100, k = 4, m = 90, trials = 2;
    const DftFrame fr = build_frame(n, 5);
    double bisp_sum = 0.0, cbp_sum = 0.0, bomp_sum = 0.0;
    for (int tr = 0; tr < trials; ++tr) {
        const GroundTruth gt = gen_signal(n, k, 1.0, AmplitudeMode::unit_random_phase, 1000 + tr);
        const rmat a = gaussian_matrix(m, n, 2000 + tr);
        const cvec y = real_complex_product(a, gt.signal);
        PursuitConfig cfg;
        cfg.k = k;
        const LineEstimate eb = bisp(y, a, fr, cfg);
        const LineEstimate ec = cbp(y, a, fr, cfg);
        const LineEstimate eo = bomp(y, a, fr, cfg);
        REQUIRE(eb.frequencies.size() == size_t(k));
        REQUIRE(ec.frequencies.size() == size_t(k));
        bisp_sum += matched_bins(gt.frequencies, eb.frequencies, n);
        cbp_sum += matched_bins(gt.frequencies, ec.frequencies, n);
        bomp_sum += matched_bins(gt.frequencies, eo.frequencies, n);

        // returned lines respect the coherence-band separation (3 grid steps)
        CHECK(min_pairwise_gap(eb.frequencies) >= 3.0 / fr.p - 1e-12);
        CHECK(min_pairwise_gap(ec.frequencies) >= 3.0 / fr.p - 1e-12);
    }
    CHECK(bisp_sum / trials < 0.02);
    CHECK(cbp_sum / trials < 0.02);
    CHECK(bisp_sum / trials < bomp_sum / trials);
    CHECK(cbp_sum / trials < bomp_sum / trials);
}

TEST_CASE("pursuits are deterministic in their inputs") {
    const int n = 100, k = 2, m = 70;
    const DftFrame fr = build_frame(n, 5);
    const GroundTruth gt = gen_signal(n, k, 2.0, AmplitudeMode::complex_gaussian, 55);
    const rmat a = gaussian_matrix(m, n, 56);
    const cvec y = real_complex_product(a, gt.signal);
    PursuitConfig cfg;
    cfg.k = k;
    CHECK(same_frequencies(bomp(y, a, fr, cfg), bomp(y, a, fr, cfg)));
    CHECK(same_frequencies(bisp(y, a, fr, cfg), bisp(y, a, fr, cfg)));
    CHECK(same_frequencies(cbp(y, a, fr, cfg), cbp(y, a, fr, cfg)));
}

}  // TEST_SUITE
