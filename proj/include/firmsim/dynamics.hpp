#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "firmsim/config.hpp"
#include "firmsim/field.hpp"
#include "firmsim/grid.hpp"
#include "firmsim/kernel.hpp"
#include "firmsim/metrics.hpp"
#include "firmsim/state.hpp"

namespace firmsim {

enum class RelocationDraw : std::uint8_t { Stay, EvaluateExisting, EvaluateVacant };

struct StepReport {
    std::int64_t step = 0;
    std::int64_t n_old = 0;
    std::int64_t n_new = 0;
    std::int64_t n_spinoffs_old = 0;
    std::int64_t n_spinoffs_new = 0;
    std::int64_t n_moves_existing = 0;
    std::int64_t n_moves_vacant = 0;
    std::int64_t n_stays = 0;          // lottery stays plus rejected improvements
    std::int64_t n_no_candidates = 0;  // forced stays: the drawn candidate class was empty
    double realized_growth_rate = 0.0;  // (W_after - W_before) / W_before
    double l_index = 0.0;               // L(metric_distance) on the post-step census
};

struct RunResult {
    std::vector<StepReport> reports;
    std::vector<std::pair<std::int64_t, PopulationGrid>> snapshots;
    SimulationState final_state;
};

// Every division's size grows by exactly one unit.
void grow_divisions(SimulationState& state);

struct SpinoffSummary {
    std::uint64_t first_child_id = 0;
    std::int64_t children_old = 0;
    std::int64_t children_new = 0;
};

/**
 * Splits every division that outgrew its cap, in ascending id order:
 *   - old division, size == delta(old): with probability phi the spin-off is
 *     a new-type child (type switch); the uniform draw is consumed whenever
 *     this branch is reached.
 *   - old division, size >  delta(old): old-type child.
 *   - new division, size >  delta(new): new-type child.
 * Children start at size zero in the parent's cell and get fresh ids; the
 * parent's size resets to zero. The cached census is kept up to date.
 */
SpinoffSummary process_spinoffs(SimulationState& state, const SimConfig& cfg);

// grow_divisions then process_spinoffs in a single pass over the sizes;
// reproduces the two-call sequence bit for bit. The engine's step uses this.
SpinoffSummary grow_and_spinoff(SimulationState& state, const SimConfig& cfg);

/**
 * Precomputed integer thresholds for the relocation lottery. Comparing the
 * raw 53-bit draw against ceil(lambda * 2^53) decides exactly the same
 * branch as comparing the [0,1) double against lambda (the scaling by 2^53
 * is a power-of-two exponent shift, so the threshold is exact), while
 * keeping the per-division cost to one integer compare.
 */
struct RelocationLottery {
    std::uint64_t t_stay = 0;      // draw < t_stay -> Stay
    std::uint64_t t_existing = 0;  // draw < t_existing -> EvaluateExisting

    static RelocationLottery from(double lambda1, double lambda1_plus_2) {
        auto threshold = [](double p) {
            return static_cast<std::uint64_t>(std::ceil(p * 9007199254740992.0));  // 2^53
        };
        return {threshold(lambda1), threshold(lambda1_plus_2)};
    }
};

// One lottery draw: u < l1 -> Stay, u < l1+l2 -> EvaluateExisting, else EvaluateVacant.
inline RelocationDraw classify_relocation(Rng& rng, const RelocationLottery& lottery) {
    const std::uint64_t u = rng.next_u64() >> 11;
    if (u < lottery.t_stay) return RelocationDraw::Stay;
    if (u < lottery.t_existing) return RelocationDraw::EvaluateExisting;
    return RelocationDraw::EvaluateVacant;
}

inline RelocationDraw classify_relocation(Rng& rng, double lambda1, double lambda1_plus_2) {
    return classify_relocation(rng, RelocationLottery::from(lambda1, lambda1_plus_2));
}

inline RelocationDraw classify_relocation(Rng& rng, const SimConfig& cfg) {
    return classify_relocation(rng, cfg.lambda1, cfg.lambda1 + cfg.lambda2);
}

struct MoveDecision {
    enum class Kind : std::uint8_t { Stay, Move, NoCandidates };
    Kind kind = Kind::Stay;
    CellId destination;
};

/**
 * Per-step destination tables for one division type, built against a frozen
 * census and utility field.
 *
 * Candidate sets: EvaluateExisting draws from occupied cells excluding the
 * mover's own; EvaluateVacant draws from empty cells. ArgmaxImprove picks the
 * best candidate (ties uniform at random) and moves only on a strict utility
 * improvement over the current cell.
 *
 * LogitSample draws the destination with probability proportional to the
 * candidate's attractiveness and always moves. An occupied candidate weighs
 * its population times its spatial utility, size-proportional attachment in
 * the tradition of the Simon growth process with the composite utility as
 * the locational modifier; a vacant candidate weighs its utility alone
 * (there is no population to attach to, only the quality of the site).
 * Negative utilities count as zero. These weights are invariant under the
 * exponential growth of the utility scale as the population grows; weighting
 * by exp(U) instead degenerates to a hard argmax within a few dozen steps,
 * freezing the landscape into a single cell and killing the city-size
 * hierarchy the model exists to produce. A candidate set with no positive
 * weight falls back to the uniform draw, which is also the no-preference
 * model's scatter behaviour.
 */
class DestinationChooser {
public:
    DestinationChooser(const PopulationGrid& frozen_census, const UtilityField& utility, SelectionMode mode);

    MoveDecision decide(std::uint32_t current_cell, RelocationDraw draw, Rng& rng) const;

    // Flat-index variant of decide; the destination is only meaningful for
    // Kind::Move. Avoids the coordinate round-trip in per-division loops.
    struct IndexDecision {
        MoveDecision::Kind kind;
        std::uint32_t destination;
    };
    IndexDecision decide_index(std::uint32_t current_cell, RelocationDraw draw, Rng& rng) const;

private:
    IndexDecision decide_existing_argmax(std::uint32_t current, Rng& rng) const;
    IndexDecision decide_vacant_argmax(std::uint32_t current, Rng& rng) const;
    IndexDecision decide_existing_logit(std::uint32_t current, Rng& rng) const;
    IndexDecision decide_vacant_logit(Rng& rng) const;

    int width_ = 0;
    SelectionMode mode_;
    std::vector<double> utility_;  // copy of the field, indexed by cell

    std::vector<std::uint32_t> occupied_;
    std::vector<std::uint32_t> vacant_;

    // Argmax tables.
    double best_occupied_ = 0.0;
    double best_vacant_ = 0.0;
    std::vector<std::uint32_t> best_occupied_ties_;
    std::vector<std::uint32_t> best_vacant_ties_;

    // Sampling tables: per-candidate weights max(U, 0) and inclusive prefix sums.
    std::vector<double> occ_weight_, occ_cum_;
    std::vector<double> vac_cum_;
    std::vector<std::int32_t> occ_pos_;  // cell -> index into occupied_, -1 elsewhere
};

// Convenience wrapper building a one-shot chooser; the engine reuses
// per-step choosers instead.
MoveDecision select_destination(const PopulationGrid& frozen_census, const UtilityField& utility, CellId current,
                                RelocationDraw draw, SelectionMode mode, Rng& rng);

/**
 * One run of the model. A step executes, in order: growth, spin-offs, utility
 * fields on the frozen post-spin-off census, relocation decisions for every
 * division in ascending id order against those frozen fields, then all moves
 * applied at once. With a fixed seed the whole run is reproducible.
 */
class Simulation {
public:
    explicit Simulation(SimConfig cfg, std::uint32_t kernel_cell_budget = kDefaultKernelCellBudget);

    StepReport step();

    const SimConfig& config() const { return cfg_; }
    const KernelSet& kernels() const { return kernels_; }
    SimulationState& state() { return state_; }
    const SimulationState& state() const { return state_; }
    SimulationState take_state() { return std::move(state_); }

private:
    SimConfig cfg_;
    KernelSet kernels_;
    SimulationState state_;
};

// new_simulation + cfg.steps x step(); snapshots of the census are captured
// every snapshot_every steps when the interval is positive.
RunResult run(const SimConfig& cfg, std::int64_t snapshot_every = 0);

inline PowerLawFit growth_fit(const std::vector<StepReport>& reports, std::int64_t window_lo,
                              std::int64_t window_hi) {
    std::vector<std::int64_t> totals(reports.size());
    for (size_t i = 0; i < reports.size(); ++i) totals[i] = reports[i].n_old + reports[i].n_new;
    const std::int64_t first = reports.empty() ? 0 : reports.front().step;
    return growth_fit(totals, first, window_lo, window_hi);
}

}  // namespace firmsim
