#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "firmsim/grid.hpp"
#include "firmsim/kernel.hpp"

namespace firmsim {

/**
 * field(i) = sum_j counts(j) * w(i,j), summed over every cell j including
 * j = i. Zero-count cells are skipped; the accumulation order over the
 * remaining cells is fixed (ascending j), so results are reproducible.
 * Throws std::invalid_argument("DimensionMismatch...") if counts does not
 * match the kernel's cell count.
 */
ScalarField potential_field(std::span<const std::int64_t> counts, const DecayKernel& kernel);

struct UtilityField {
    DivisionType dtype = DivisionType::Old;
    ScalarField values;
};

// Which census column a kernel product was computed against.
enum class CountKind : std::uint8_t { Total, OldOnly, NewOnly };

// Per-step memo of kernel x counts products. Several utility terms reuse the
// same product whenever alphas coincide (e.g. mp and cp for a type), so one
// step needs far fewer matrix passes than the six potential terms suggest.
class ProductCache {
public:
    const ScalarField& product(const DecayKernel& kernel, CountKind kind, std::span<const std::int64_t> counts);
    void clear() { cache_.clear(); }

private:
    std::map<std::pair<const DecayKernel*, CountKind>, ScalarField> cache_;
};

/**
 * Composite location utility for divisions of the given type:
 *   U(i) = beta_mp * MP(i) + beta_ap * AP(i) + beta_cp * CP(i)
 * MP and CP are driven by the total census, AP by the evaluator's own type
 * only. Terms with a zero beta are skipped exactly, so an all-zero beta
 * vector yields the all-zero field. Defined for every cell regardless of
 * occupancy.
 */
UtilityField utility_field(const PopulationGrid& census, DivisionType dtype, const KernelSet& kernels,
                           const TypeParams& params, ProductCache* cache = nullptr);

/**
 * Softmax choice probabilities over a candidate set: p_i proportional to
 * exp(u_i). Computed max-shifted, which is algebraically identical and does
 * not overflow for large utilities. Throws on an empty candidate set.
 */
std::vector<double> relocation_probabilities(std::span<const double> utilities);

}  // namespace firmsim
