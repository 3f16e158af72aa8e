#pragma once

#include <vector>

#include "linespec/types.hpp"

namespace linespec {

/// Minimum-cost pairing between estimated and true frequencies under the
/// circular distance. Errors are reported in the unit set by bins_per_unit
/// at match time (1.0 keeps normalized frequency, N converts to DFT bins).
struct MatchResult {
    std::vector<int> assignment;  ///< estimate index -> truth index, -1 if unmatched
    rvec per_pair_errors;         ///< matched pairs, estimate order
    double mean_error = 0.0;      ///< mean over matched pairs
    double total_cost = 0.0;      ///< sum over matched pairs
    int misses = 0;               ///< size difference left unmatched
};

/// Optimal assignment (Hungarian algorithm) between the two frequency sets.
/// Unequal sizes are handled by zero-cost padding: the surplus side's extras
/// go unmatched and are counted in `misses`. Throws on empty input.
MatchResult hungarian_match(const std::vector<Frequency>& truth,
                            const std::vector<Frequency>& estimate, double bins_per_unit = 1.0);

/// Relative l2 error ||f - f_hat|| / ||f||. Throws on length mismatch or
/// zero reference.
double signal_error(const cvec& f, const cvec& f_hat);

}  // namespace linespec
