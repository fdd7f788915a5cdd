#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "firmsim/grid.hpp"

namespace firmsim {

/**
 * Cluster density K(d): the population-weighted mean number of divisions
 * within Euclidean distance d of each division's cell, self-inclusive.
 *
 *   K = sum_i N_i * (divisions in cells within distance d of cell i) / N
 *
 * Distances are between cell centers; the boundary is closed (<= d). The
 * numerator is accumulated in integer arithmetic. Throws
 * std::runtime_error("EmptyPopulation") when there are no divisions.
 */
double cluster_k(const PopulationGrid& census, double d);

// L(d) = sqrt(K / pi) - d. Higher means more clustered.
double cluster_l(double k, double d);

struct ClusterIndex {
    double d = 10.0;
    double k_value = 0.0;
    double l_value = 0.0;
};

ClusterIndex cluster_index(const PopulationGrid& census, double d);

// An occupied cell and its division count.
struct RankedCity {
    CellId cell;
    std::int64_t count = 0;

    friend bool operator==(const RankedCity&, const RankedCity&) = default;
};

// Occupied cells sorted by count descending; ties broken by row-major cell order.
std::vector<RankedCity> rank_size(const PopulationGrid& census);

struct PowerLawFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    // Set when the fit is undefined: fewer than two points, or zero variance
    // in the response (slope is reported as 0 and r_squared as 0).
    bool degenerate = false;
};

// OLS of log(count) on log(rank), ranks 1..n. Counts must be positive and
// sorted descending.
PowerLawFit power_law_fit(std::span<const double> counts);
PowerLawFit power_law_fit(const std::vector<RankedCity>& ranked);

/**
 * OLS of log(total) on the step index, over entries whose step number
 * (first_step + k) lies in [window_lo, window_hi]. The slope estimates the
 * continuous growth rate. Totals in the window must be positive.
 */
PowerLawFit growth_fit(std::span<const double> totals, std::int64_t first_step, std::int64_t window_lo,
                       std::int64_t window_hi);
PowerLawFit growth_fit(std::span<const std::int64_t> totals, std::int64_t first_step, std::int64_t window_lo,
                       std::int64_t window_hi);

}  // namespace firmsim
