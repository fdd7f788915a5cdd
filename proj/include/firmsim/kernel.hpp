#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "firmsim/config.hpp"

namespace firmsim {

/**
 * Precomputed distance-decay weights w(i,j) = exp(-alpha * d(i,j)) for every
 * ordered cell pair, with d the Euclidean distance between cell centers on
 * the planar grid (no wraparound). Symmetric, w(i,i) = 1, stored row-major:
 * row(i)[j] = w(i,j).
 */
struct DecayKernel {
    int width = 0;
    int height = 0;
    double alpha = 0.0;
    std::vector<double> weights;  // (width*height)^2 entries

    std::uint32_t cells() const { return static_cast<std::uint32_t>(width) * height; }
    double at(std::uint32_t i, std::uint32_t j) const { return weights[static_cast<size_t>(i) * cells() + j]; }
    const double* row(std::uint32_t i) const { return weights.data() + static_cast<size_t>(i) * cells(); }
};

// Grids above this many cells refuse to build a full pairwise kernel
// (6.25M weights, the 50x50 landscape).
inline constexpr std::uint32_t kDefaultKernelCellBudget = 2500;

// Throws std::length_error("GridTooLarge...") when width*height exceeds the budget.
DecayKernel build_decay_kernel(int width, int height, double alpha,
                               std::uint32_t cell_budget = kDefaultKernelCellBudget);

// The six kernels one run needs: (old, new) x (mp, ap, cp). Kernels with the
// same alpha are shared, which collapses the set to 2-3 distinct matrices for
// the usual parameterizations.
class KernelSet {
public:
    KernelSet(int width, int height, const TypeParams& old_params, const TypeParams& new_params,
              std::uint32_t cell_budget = kDefaultKernelCellBudget);

    const DecayKernel& mp(DivisionType t) const { return *mp_[idx(t)]; }
    const DecayKernel& ap(DivisionType t) const { return *ap_[idx(t)]; }
    const DecayKernel& cp(DivisionType t) const { return *cp_[idx(t)]; }

private:
    static int idx(DivisionType t) { return static_cast<int>(t); }

    std::vector<std::shared_ptr<const DecayKernel>> pool_;
    std::shared_ptr<const DecayKernel> mp_[2], ap_[2], cp_[2];
};

}  // namespace firmsim
