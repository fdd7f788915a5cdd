#include "firmsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace firmsim {

void grow_divisions(SimulationState& state) {
    auto* sizes = state.divisions.sizes();
    const std::uint64_t n = state.divisions.count();
    for (std::uint64_t i = 0; i < n; ++i) sizes[i] = static_cast<std::uint16_t>(sizes[i] + 1);
}

namespace {

// Spin-off rules for one division whose post-growth size is `size`.
// Returns true if a child was appended (the parent's size resets to zero).
inline bool apply_spinoff_rules(SimulationState& state, const SimConfig& cfg, std::uint64_t id,
                                std::uint16_t size, std::uint16_t delta_old, std::uint16_t delta_new,
                                SpinoffSummary& summary) {
    if (state.divisions.type_of(id) == DivisionType::Old) {
        if (size > delta_old) {
            const std::uint32_t cell = state.divisions.cell_of(id);
            state.divisions.set_size(id, 0);
            state.divisions.append(DivisionType::Old, 0, cell);
            census_add(state, DivisionType::Old, cell);
            ++summary.children_old;
            return true;
        }
        if (size == delta_old && state.rng.uniform01() < cfg.phi) {
            const std::uint32_t cell = state.divisions.cell_of(id);
            state.divisions.set_size(id, 0);
            state.divisions.append(DivisionType::New, 0, cell);
            census_add(state, DivisionType::New, cell);
            ++summary.children_new;
            return true;
        }
        return false;
    }
    if (size > delta_new) {
        const std::uint32_t cell = state.divisions.cell_of(id);
        state.divisions.set_size(id, 0);
        state.divisions.append(DivisionType::New, 0, cell);
        census_add(state, DivisionType::New, cell);
        ++summary.children_new;
        return true;
    }
    return false;
}

}  // namespace

SpinoffSummary process_spinoffs(SimulationState& state, const SimConfig& cfg) {
    const std::uint64_t n_before = state.divisions.count();
    SpinoffSummary summary{n_before, 0, 0};
    const auto delta_old = static_cast<std::uint16_t>(cfg.params_old.delta_max);
    const auto delta_new = static_cast<std::uint16_t>(cfg.params_new.delta_max);

    for (std::uint64_t id = 0; id < n_before; ++id) {
        apply_spinoff_rules(state, cfg, id, state.divisions.size_of(id), delta_old, delta_new, summary);
    }
    return summary;
}

// grow_divisions followed by process_spinoffs, in one pass over the sizes.
// Growth is element-independent and the spin-off scan only reads a
// division's own freshly grown size, so interleaving the two phases
// reproduces the sequential composition bit for bit (including the order of
// the phi draws).
SpinoffSummary grow_and_spinoff(SimulationState& state, const SimConfig& cfg) {
    const std::uint64_t n_before = state.divisions.count();
    SpinoffSummary summary{n_before, 0, 0};
    const auto delta_old = static_cast<std::uint16_t>(cfg.params_old.delta_max);
    const auto delta_new = static_cast<std::uint16_t>(cfg.params_new.delta_max);

    std::uint16_t* sizes = state.divisions.sizes();
    const std::uint8_t* types = state.divisions.types();
    for (std::uint64_t id = 0; id < n_before; ++id) {
        const auto grown = static_cast<std::uint16_t>(sizes[id] + 1);
        sizes[id] = grown;
        const bool at_cap = types[id] == static_cast<std::uint8_t>(DivisionType::Old) ? grown >= delta_old
                                                                                      : grown > delta_new;
        if (at_cap) {
            apply_spinoff_rules(state, cfg, id, grown, delta_old, delta_new, summary);
            sizes = state.divisions.sizes();  // append may reallocate
            types = state.divisions.types();
        }
    }
    return summary;
}

DestinationChooser::DestinationChooser(const PopulationGrid& frozen_census, const UtilityField& utility,
                                       SelectionMode mode)
    : width_(frozen_census.width), mode_(mode), utility_(utility.values.values) {
    const std::uint32_t n = frozen_census.cells();
    for (std::uint32_t i = 0; i < n; ++i) {
        (frozen_census.count_total[i] > 0 ? occupied_ : vacant_).push_back(i);
    }

    if (mode_ == SelectionMode::ArgmaxImprove) {
        auto scan_best = [this](const std::vector<std::uint32_t>& cells, double& best,
                                std::vector<std::uint32_t>& ties) {
            best = -std::numeric_limits<double>::infinity();
            for (std::uint32_t c : cells) {
                const double u = utility_[c];
                if (u > best) {
                    best = u;
                    ties.assign(1, c);
                } else if (u == best) {
                    ties.push_back(c);
                }
            }
        };
        scan_best(occupied_, best_occupied_, best_occupied_ties_);
        scan_best(vacant_, best_vacant_, best_vacant_ties_);
        return;
    }

    // Sampling tables, heaviest candidates first so most draws resolve in
    // the first few prefix-sum probes.
    auto by_weight_desc = [](std::vector<std::uint32_t>& cells, auto&& weight_of) {
        std::sort(cells.begin(), cells.end(), [&](std::uint32_t a, std::uint32_t b) {
            const double wa = weight_of(a), wb = weight_of(b);
            if (wa != wb) return wa > wb;
            return a < b;
        });
    };
    if (!occupied_.empty()) {
        auto weight_of = [&](std::uint32_t c) {
            return static_cast<double>(frozen_census.count_total[c]) * std::max(utility_[c], 0.0);
        };
        by_weight_desc(occupied_, weight_of);
        occ_pos_.assign(n, -1);
        occ_weight_.resize(occupied_.size());
        occ_cum_.resize(occupied_.size());
        double cum = 0.0;
        for (size_t k = 0; k < occupied_.size(); ++k) {
            const std::uint32_t c = occupied_[k];
            const double w = weight_of(c);
            occ_weight_[k] = w;
            cum += w;
            occ_cum_[k] = cum;
            occ_pos_[c] = static_cast<std::int32_t>(k);
        }
    }
    if (!vacant_.empty()) {
        auto weight_of = [&](std::uint32_t c) { return std::max(utility_[c], 0.0); };
        by_weight_desc(vacant_, weight_of);
        vac_cum_.resize(vacant_.size());
        double cum = 0.0;
        for (size_t k = 0; k < vacant_.size(); ++k) {
            cum += weight_of(vacant_[k]);
            vac_cum_[k] = cum;
        }
    }
}

namespace {

// First index whose inclusive prefix sum exceeds v, clamped to the last
// entry. The tables are sorted heaviest-first, so a short linear probe
// resolves most draws; the remainder falls through to a branchless
// bisection whose window update compiles to a conditional move.
size_t sample_index(const std::vector<double>& cum, double v) {
    const double* a = cum.data();
    const size_t n = cum.size();
    const size_t probe = n < 4 ? n : 4;
    for (size_t k = 0; k < probe; ++k) {
        if (v < a[k]) return k;
    }
    if (probe == n) return n - 1;
    size_t base = probe;
    size_t len = n - probe;
    while (len > 1) {
        const size_t half = len >> 1;
        base += (a[base + half - 1] <= v) ? half : 0;
        len -= half;
    }
    if (a[base] <= v && base + 1 < n) ++base;
    return base;
}

}  // namespace

DestinationChooser::IndexDecision DestinationChooser::decide_index(std::uint32_t current_cell,
                                                                   RelocationDraw draw, Rng& rng) const {
    if (draw == RelocationDraw::EvaluateExisting) {
        // The mover's own cell is occupied and excluded, so at least two
        // occupied cells are needed for a candidate to exist.
        if (occupied_.size() < 2) return {MoveDecision::Kind::NoCandidates, 0};
        return mode_ == SelectionMode::ArgmaxImprove ? decide_existing_argmax(current_cell, rng)
                                                     : decide_existing_logit(current_cell, rng);
    }
    if (draw == RelocationDraw::EvaluateVacant) {
        if (vacant_.empty()) return {MoveDecision::Kind::NoCandidates, 0};
        return mode_ == SelectionMode::ArgmaxImprove ? decide_vacant_argmax(current_cell, rng)
                                                     : decide_vacant_logit(rng);
    }
    return {MoveDecision::Kind::Stay, 0};
}

MoveDecision DestinationChooser::decide(std::uint32_t current_cell, RelocationDraw draw, Rng& rng) const {
    const IndexDecision d = decide_index(current_cell, draw, rng);
    if (d.kind == MoveDecision::Kind::Move) return {d.kind, cell_from_index(d.destination, width_)};
    return {d.kind, {}};
}

DestinationChooser::IndexDecision DestinationChooser::decide_existing_argmax(std::uint32_t current,
                                                                             Rng& rng) const {
    // A strict improvement is required. When the current cell itself attains
    // the occupied maximum this comparison fails and the division stays, so
    // the ties list can never contain the current cell on the move path.
    if (!(best_occupied_ > utility_[current])) return {MoveDecision::Kind::Stay, 0};
    const auto& ties = best_occupied_ties_;
    const std::uint32_t dest = ties.size() == 1 ? ties[0] : ties[rng.bounded(ties.size())];
    return {MoveDecision::Kind::Move, dest};
}

DestinationChooser::IndexDecision DestinationChooser::decide_vacant_argmax(std::uint32_t current,
                                                                           Rng& rng) const {
    if (!(best_vacant_ > utility_[current])) return {MoveDecision::Kind::Stay, 0};
    const auto& ties = best_vacant_ties_;
    const std::uint32_t dest = ties.size() == 1 ? ties[0] : ties[rng.bounded(ties.size())];
    return {MoveDecision::Kind::Move, dest};
}

DestinationChooser::IndexDecision DestinationChooser::decide_existing_logit(std::uint32_t current,
                                                                            Rng& rng) const {
    const std::int32_t pos = occ_pos_[current];
    const double w_current = pos >= 0 ? occ_weight_[pos] : 0.0;
    const double rest = occ_cum_.back() - w_current;
    std::uint32_t dest;
    if (rest > 0.0) {
        // Sample from the full occupied table with the current cell's weight
        // spliced out: draws landing at or beyond its slot are shifted past it.
        double v = rng.uniform01() * rest;
        const double before = pos > 0 ? occ_cum_[pos - 1] : 0.0;
        if (pos >= 0 && v >= before) v += w_current;
        size_t k = sample_index(occ_cum_, v);
        if (pos >= 0 && k == static_cast<size_t>(pos)) {
            k = k + 1 < occupied_.size() ? k + 1 : k - 1;  // float boundary guard
        }
        dest = occupied_[k];
    } else {
        // No candidate carries positive utility: uniform over the others.
        size_t k = static_cast<size_t>(rng.bounded(occupied_.size() - (pos >= 0 ? 1 : 0)));
        if (pos >= 0 && k >= static_cast<size_t>(pos)) ++k;
        dest = occupied_[k];
    }
    return {MoveDecision::Kind::Move, dest};
}

DestinationChooser::IndexDecision DestinationChooser::decide_vacant_logit(Rng& rng) const {
    std::uint32_t dest;
    if (vac_cum_.back() > 0.0) {
        const double v = rng.uniform01() * vac_cum_.back();
        dest = vacant_[sample_index(vac_cum_, v)];
    } else {
        dest = vacant_[rng.bounded(vacant_.size())];
    }
    return {MoveDecision::Kind::Move, dest};
}

MoveDecision select_destination(const PopulationGrid& frozen_census, const UtilityField& utility, CellId current,
                                RelocationDraw draw, SelectionMode mode, Rng& rng) {
    if (draw == RelocationDraw::Stay) return {MoveDecision::Kind::Stay, {}};
    DestinationChooser chooser(frozen_census, utility, mode);
    return chooser.decide(cell_index(current, frozen_census.width), draw, rng);
}

namespace {

SimConfig validated(SimConfig cfg) {
    require_valid(cfg);
    return cfg;
}

}  // namespace

Simulation::Simulation(SimConfig cfg, std::uint32_t kernel_cell_budget)
    : cfg_(validated(std::move(cfg))),
      kernels_(cfg_.width, cfg_.height, cfg_.params_old, cfg_.params_new, kernel_cell_budget),
      state_(new_simulation(cfg_)) {}

StepReport Simulation::step() {
    SimulationState& st = state_;
    const std::int64_t w_before = st.n_old + st.n_new;

    const SpinoffSummary spin = grow_and_spinoff(st, cfg_);

    StepReport report;
    report.n_spinoffs_old = spin.children_old;
    report.n_spinoffs_new = spin.children_new;

    // Utility fields and candidate tables are pure functions of the frozen
    // post-spin-off census; they consume no randomness, so building them on
    // first use keeps the draw stream identical to eager construction.
    ProductCache cache;
    std::optional<DestinationChooser> choosers[2];
    auto chooser_for = [&](DivisionType t) -> const DestinationChooser& {
        auto& slot = choosers[static_cast<int>(t)];
        if (!slot) {
            const TypeParams& params = t == DivisionType::Old ? cfg_.params_old : cfg_.params_new;
            slot.emplace(st.census, utility_field(st.census, t, kernels_, params, &cache), cfg_.selection_mode);
        }
        return *slot;
    };

    const RelocationLottery lottery = RelocationLottery::from(cfg_.lambda1, cfg_.lambda1 + cfg_.lambda2);

    // The update is synchronous: every decision is made against the frozen
    // chooser tables, which snapshot the census and utilities at build time.
    // Applying a move immediately therefore cannot influence any later
    // decision, and each division's own cell is read before its move.
    const std::uint64_t n = st.divisions.count();
    for (std::uint64_t id = 0; id < n; ++id) {
        const RelocationDraw draw = classify_relocation(st.rng_move, lottery);
        if (draw == RelocationDraw::Stay) {
            ++report.n_stays;
            continue;
        }
        const DivisionType t = st.divisions.type_of(id);
        const DestinationChooser::IndexDecision decision =
            chooser_for(t).decide_index(st.divisions.cell_of(id), draw, st.rng_move);
        switch (decision.kind) {
            case MoveDecision::Kind::Move: {
                census_move(st, t, st.divisions.cell_of(id), decision.destination);
                st.divisions.set_cell(id, decision.destination);
                ++(draw == RelocationDraw::EvaluateExisting ? report.n_moves_existing : report.n_moves_vacant);
                break;
            }
            case MoveDecision::Kind::Stay:
                ++report.n_stays;
                break;
            case MoveDecision::Kind::NoCandidates:
                ++report.n_no_candidates;
                break;
        }
    }

    st.step += 1;
    report.step = st.step;
    report.n_old = st.n_old;
    report.n_new = st.n_new;
    const std::int64_t w_after = st.n_old + st.n_new;
    report.realized_growth_rate =
        w_before > 0 ? static_cast<double>(w_after - w_before) / static_cast<double>(w_before) : 0.0;
    report.l_index = cluster_l(cluster_k(st.census, cfg_.metric_distance), cfg_.metric_distance);
    return report;
}

RunResult run(const SimConfig& cfg, std::int64_t snapshot_every) {
    Simulation sim(cfg);
    RunResult result;
    result.reports.reserve(static_cast<size_t>(cfg.steps));
    for (std::int64_t s = 1; s <= cfg.steps; ++s) {
        result.reports.push_back(sim.step());
        if (snapshot_every > 0 && s % snapshot_every == 0) {
            result.snapshots.emplace_back(s, sim.state().census);
        }
    }
    result.final_state = sim.take_state();
    return result;
}

}  // namespace firmsim
