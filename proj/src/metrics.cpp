#include "linespec/metrics.hpp"

#include <limits>
#include <stdexcept>
#include <vector>

namespace linespec {

MatchResult hungarian_match(const std::vector<Frequency>& truth,
                            const std::vector<Frequency>& estimate, double bins_per_unit) {
    const int kt = static_cast<int>(truth.size());
    const int ke = static_cast<int>(estimate.size());
    if (kt == 0 || ke == 0) throw std::invalid_argument("hungarian_match: empty input");

    // Pad the smaller side with zero-cost dummies to make the problem square.
    const int s = std::max(kt, ke);
    auto cost = [&](int i, int j) {
        return (i < ke && j < kt) ? circular_distance(estimate[i], truth[j]) : 0.0;
    };

    // Shortest-augmenting-path assignment with row/column potentials.
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> u(s + 1, 0.0), v(s + 1, 0.0);
    std::vector<int> match(s + 1, 0), way(s + 1, 0);  // match[j]: row owning column j
    for (int i = 1; i <= s; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> min_slack(s + 1, kInf);
        std::vector<char> used(s + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            int j1 = 0;
            double delta = kInf;
            for (int j = 1; j <= s; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < min_slack[j]) {
                    min_slack[j] = cur;
                    way[j] = j0;
                }
                if (min_slack[j] < delta) {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= s; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    MatchResult result;
    result.assignment.assign(ke, -1);
    for (int j = 1; j <= s; ++j) {
        const int i = match[j] - 1;
        if (i < ke && j - 1 < kt) result.assignment[i] = j - 1;
    }
    std::vector<double> errors;
    errors.reserve(std::min(kt, ke));
    for (int i = 0; i < ke; ++i)
        if (result.assignment[i] >= 0)
            errors.push_back(bins_per_unit *
                             circular_distance(estimate[i], truth[result.assignment[i]]));
    result.per_pair_errors = Eigen::Map<const rvec>(errors.data(), errors.size());
    result.total_cost = result.per_pair_errors.sum();
    result.mean_error = errors.empty() ? 0.0 : result.total_cost / errors.size();
    result.misses = std::abs(kt - ke);
    return result;
}

double signal_error(const cvec& f, const cvec& f_hat) {
    if (f.size() != f_hat.size()) throw std::invalid_argument("signal_error: length mismatch");
    const double ref = f.norm();
    if (ref == 0.0) throw std::invalid_argument("signal_error: zero reference signal");
    return (f - f_hat).norm() / ref;
}

}  // namespace linespec
