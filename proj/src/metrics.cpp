#include "firmsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace firmsim {

double cluster_k(const PopulationGrid& census, double d) {
    if (!(d > 0.0)) throw std::invalid_argument("cluster radius must be > 0");
    const std::int64_t n = census.population();
    if (n == 0) throw std::runtime_error("EmptyPopulation: cluster index needs at least one division");

    // Offsets whose cell-center distance is within the closed radius.
    const int reach = static_cast<int>(std::floor(d));
    std::vector<std::pair<int, int>> offsets;
    for (int dy = -reach; dy <= reach; ++dy) {
        for (int dx = -reach; dx <= reach; ++dx) {
            if (static_cast<double>(dx) * dx + static_cast<double>(dy) * dy <= d * d) {
                offsets.emplace_back(dx, dy);
            }
        }
    }

    const int w = census.width;
    const int h = census.height;
    std::int64_t acc = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::int64_t here = census.count_total[static_cast<size_t>(y) * w + x];
            if (here == 0) continue;
            std::int64_t within = 0;
            for (const auto& [dx, dy] : offsets) {
                const int nx = x + dx;
                const int ny = y + dy;
                if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                within += census.count_total[static_cast<size_t>(ny) * w + nx];
            }
            acc += here * within;
        }
    }
    return static_cast<double>(acc) / static_cast<double>(n);
}

double cluster_l(double k, double d) { return std::sqrt(k / std::numbers::pi) - d; }

ClusterIndex cluster_index(const PopulationGrid& census, double d) {
    const double k = cluster_k(census, d);
    return ClusterIndex{d, k, cluster_l(k, d)};
}

std::vector<RankedCity> rank_size(const PopulationGrid& census) {
    std::vector<RankedCity> cities;
    for (std::uint32_t idx = 0; idx < census.cells(); ++idx) {
        if (census.count_total[idx] > 0) {
            cities.push_back({cell_from_index(idx, census.width), census.count_total[idx]});
        }
    }
    std::sort(cities.begin(), cities.end(), [w = census.width](const RankedCity& a, const RankedCity& b) {
        if (a.count != b.count) return a.count > b.count;
        return cell_index(a.cell, w) < cell_index(b.cell, w);
    });
    return cities;
}

namespace {

PowerLawFit ols(std::span<const double> xs, std::span<const double> ys) {
    PowerLawFit fit;
    const size_t n = xs.size();
    if (n < 2) {
        fit.degenerate = true;
        fit.intercept = n == 1 ? ys[0] : 0.0;
        return fit;
    }
    bool xs_equal = true, ys_equal = true;
    for (size_t i = 1; i < n; ++i) {
        xs_equal = xs_equal && xs[i] == xs[0];
        ys_equal = ys_equal && ys[i] == ys[0];
    }
    if (xs_equal || ys_equal) {
        fit.degenerate = true;
        fit.intercept = ys[0];
        return fit;
    }
    double xm = 0.0, ym = 0.0;
    for (size_t i = 0; i < n; ++i) {
        xm += xs[i];
        ym += ys[i];
    }
    xm /= static_cast<double>(n);
    ym /= static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - xm;
        const double dy = ys[i] - ym;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        fit.degenerate = true;
        fit.intercept = ym;
        return fit;
    }
    fit.slope = sxy / sxx;
    fit.intercept = ym - fit.slope * xm;
    fit.r_squared = std::clamp((sxy * sxy) / (sxx * syy), 0.0, 1.0);
    return fit;
}

}  // namespace

PowerLawFit power_law_fit(std::span<const double> counts) {
    std::vector<double> xs(counts.size()), ys(counts.size());
    for (size_t r = 0; r < counts.size(); ++r) {
        if (!(counts[r] > 0.0)) throw std::invalid_argument("rank-size counts must be positive");
        xs[r] = std::log(static_cast<double>(r + 1));
        ys[r] = std::log(counts[r]);
    }
    return ols(xs, ys);
}

PowerLawFit power_law_fit(const std::vector<RankedCity>& ranked) {
    std::vector<double> counts(ranked.size());
    for (size_t i = 0; i < ranked.size(); ++i) counts[i] = static_cast<double>(ranked[i].count);
    return power_law_fit(counts);
}

PowerLawFit growth_fit(std::span<const double> totals, std::int64_t first_step, std::int64_t window_lo,
                       std::int64_t window_hi) {
    std::vector<double> xs, ys;
    for (size_t k = 0; k < totals.size(); ++k) {
        const std::int64_t step = first_step + static_cast<std::int64_t>(k);
        if (step < window_lo || step > window_hi) continue;
        if (!(totals[k] > 0.0)) throw std::invalid_argument("growth series must be positive inside the window");
        xs.push_back(static_cast<double>(step));
        ys.push_back(std::log(totals[k]));
    }
    return ols(xs, ys);
}

PowerLawFit growth_fit(std::span<const std::int64_t> totals, std::int64_t first_step, std::int64_t window_lo,
                       std::int64_t window_hi) {
    std::vector<double> values(totals.size());
    for (size_t k = 0; k < totals.size(); ++k) values[k] = static_cast<double>(totals[k]);
    return growth_fit(std::span<const double>(values), first_step, window_lo, window_hi);
}

}  // namespace firmsim
