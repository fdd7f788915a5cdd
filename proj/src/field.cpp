#include "firmsim/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace firmsim {

namespace {

// field[i] += sum_j counts[j] * w(i,j). The kernel is symmetric, so each
// strict upper-triangle entry serves both field[i] and field[j]; one pass
// over half the matrix covers the full product. The traversal order is
// fixed, so repeated evaluations are bit-identical.
void accumulate_product(ScalarField& field, std::span<const std::int64_t> counts, const DecayKernel& kernel) {
    const std::uint32_t n = kernel.cells();
    std::vector<double> c(n);
    for (std::uint32_t i = 0; i < n; ++i) c[i] = static_cast<double>(counts[i]);

    double* out = field.values.data();
    for (std::uint32_t j = 0; j < n; ++j) {
        const double cj = c[j];
        const double* row = kernel.row(j);
        double into_j = cj;  // diagonal: w(j,j) = 1
        if (cj != 0.0) {
            for (std::uint32_t i = j + 1; i < n; ++i) {
                const double w = row[i];
                out[i] += cj * w;
                into_j += c[i] * w;
            }
        } else {
            for (std::uint32_t i = j + 1; i < n; ++i) {
                into_j += c[i] * row[i];
            }
        }
        out[j] += into_j;
    }
}

void check_dims(std::span<const std::int64_t> counts, const DecayKernel& kernel) {
    if (counts.size() != kernel.cells()) {
        throw std::invalid_argument("DimensionMismatch: counts has " + std::to_string(counts.size()) +
                                    " cells, kernel expects " + std::to_string(kernel.cells()));
    }
}

}  // namespace

ScalarField potential_field(std::span<const std::int64_t> counts, const DecayKernel& kernel) {
    check_dims(counts, kernel);
    ScalarField field(kernel.width, kernel.height, 0.0);
    accumulate_product(field, counts, kernel);
    return field;
}

const ScalarField& ProductCache::product(const DecayKernel& kernel, CountKind kind,
                                         std::span<const std::int64_t> counts) {
    const auto key = std::make_pair(&kernel, kind);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
        it = cache_.emplace(key, potential_field(counts, kernel)).first;
    }
    return it->second;
}

UtilityField utility_field(const PopulationGrid& census, DivisionType dtype, const KernelSet& kernels,
                           const TypeParams& params, ProductCache* cache) {
    const CountKind own_kind = dtype == DivisionType::Old ? CountKind::OldOnly : CountKind::NewOnly;
    const auto& own_counts = dtype == DivisionType::Old ? census.count_old : census.count_new;

    UtilityField u;
    u.dtype = dtype;
    u.values = ScalarField(census.width, census.height, 0.0);

    ProductCache local;
    ProductCache& memo = cache ? *cache : local;

    struct Term {
        double beta;
        const DecayKernel* kernel;
        CountKind kind;
        std::span<const std::int64_t> counts;
    };
    const Term terms[3] = {
        {params.beta_mp, &kernels.mp(dtype), CountKind::Total, census.count_total},
        {params.beta_ap, &kernels.ap(dtype), own_kind, own_counts},
        {params.beta_cp, &kernels.cp(dtype), CountKind::Total, census.count_total},
    };

    // Terms sharing a kernel and census column add coefficients up front;
    // a group that cancels to zero (mp against cp for the common equal-alpha
    // parameterizations) would contribute exactly zero per cell, so the
    // matrix pass is skipped outright.
    struct Group {
        const DecayKernel* kernel;
        CountKind kind;
        std::span<const std::int64_t> counts;
        double coefficient;
    };
    Group groups[3];
    int n_groups = 0;
    for (const Term& term : terms) {
        if (term.beta == 0.0) continue;
        check_dims(term.counts, *term.kernel);
        bool merged = false;
        for (int g = 0; g < n_groups; ++g) {
            if (groups[g].kernel == term.kernel && groups[g].kind == term.kind) {
                groups[g].coefficient += term.beta;
                merged = true;
                break;
            }
        }
        if (!merged) groups[n_groups++] = {term.kernel, term.kind, term.counts, term.beta};
    }
    for (int g = 0; g < n_groups; ++g) {
        if (groups[g].coefficient == 0.0) continue;
        const ScalarField& p = memo.product(*groups[g].kernel, groups[g].kind, groups[g].counts);
        for (size_t i = 0; i < u.values.size(); ++i) u.values[i] += groups[g].coefficient * p[i];
    }
    return u;
}

std::vector<double> relocation_probabilities(std::span<const double> utilities) {
    if (utilities.empty()) throw std::invalid_argument("EmptyCandidateSet: no utilities given");
    const double u_max = *std::max_element(utilities.begin(), utilities.end());
    std::vector<double> p(utilities.size());
    double total = 0.0;
    for (size_t i = 0; i < utilities.size(); ++i) {
        p[i] = std::exp(utilities[i] - u_max);
        total += p[i];
    }
    for (double& v : p) v /= total;
    return p;
}

}  // namespace firmsim
