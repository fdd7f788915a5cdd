#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "firmsim/config.hpp"
#include "firmsim/grid.hpp"
#include "firmsim/rng.hpp"

namespace firmsim {

// Read-only view of one division.
struct Division {
    std::uint64_t id = 0;
    DivisionType dtype = DivisionType::Old;
    std::int64_t size = 0;
    CellId cell;
};

/**
 * The division population, stored column-wise. A division's id is its index:
 * divisions are only ever appended (there is no death process), so ids are
 * stable for the whole run and ascending-id iteration is plain index order.
 */
class DivisionStore {
public:
    std::uint64_t count() const { return sizes_.size(); }

    std::uint64_t append(DivisionType t, std::uint16_t size, std::uint32_t cell) {
        sizes_.push_back(size);
        types_.push_back(static_cast<std::uint8_t>(t));
        cells_.push_back(cell);
        return sizes_.size() - 1;
    }

    std::uint16_t size_of(std::uint64_t id) const { return sizes_[id]; }
    DivisionType type_of(std::uint64_t id) const { return static_cast<DivisionType>(types_[id]); }
    std::uint32_t cell_of(std::uint64_t id) const { return cells_[id]; }

    void set_size(std::uint64_t id, std::uint16_t s) { sizes_[id] = s; }
    void set_cell(std::uint64_t id, std::uint32_t c) { cells_[id] = c; }
    void set_type(std::uint64_t id, DivisionType t) { types_[id] = static_cast<std::uint8_t>(t); }

    // Hot-loop access.
    std::uint16_t* sizes() { return sizes_.data(); }
    const std::uint16_t* sizes() const { return sizes_.data(); }
    const std::uint8_t* types() const { return types_.data(); }
    const std::uint32_t* cells() const { return cells_.data(); }

    void reserve(std::uint64_t n) {
        sizes_.reserve(n);
        types_.reserve(n);
        cells_.reserve(n);
    }

private:
    std::vector<std::uint16_t> sizes_;
    std::vector<std::uint8_t> types_;
    std::vector<std::uint32_t> cells_;
};

struct SimulationState {
    std::int64_t step = 0;
    DivisionStore divisions;
    PopulationGrid census;  // kept consistent with divisions at every exposed point
    // Two substreams derived from the one seed. Demography (initial sizes,
    // type-switch draws) and relocation (lottery, destinations, tie-breaks)
    // never share draws, so the population path of a seed is identical
    // across selection modes and lottery parameters; sweeps then compare
    // spatial outcomes on a common demographic realization.
    Rng rng;       // demography
    Rng rng_move;  // relocation
    std::int64_t n_old = 0;
    std::int64_t n_new = 0;

    Division division(std::uint64_t id) const {
        return Division{id, divisions.type_of(id), divisions.size_of(id),
                        cell_from_index(divisions.cell_of(id), census.width)};
    }
};

/**
 * Builds the initial landscape: cfg.initial_divisions old-type divisions,
 * one per cell in row-major order from (0,0). Sizes follow
 * cfg.init_size_policy; UniformRandom draws integer sizes in
 * [0, delta_max(old)) from the seeded stream, in id order.
 */
SimulationState new_simulation(const SimConfig& cfg);

// Recomputes per-cell counts from the division list (pure; does not touch the cache).
PopulationGrid census(const SimulationState& state);

// Adds one division to the cached census and the type totals.
void census_add(SimulationState& state, DivisionType t, std::uint32_t cell);
// Moves one division between cells in the cached census.
void census_move(SimulationState& state, DivisionType t, std::uint32_t from, std::uint32_t to);

// Text dump of the full state (step, rng state, divisions). Two states are
// byte-identical iff their dumps are equal; used by determinism checks.
void serialize_state(const SimulationState& state, std::ostream& os);

}  // namespace firmsim
