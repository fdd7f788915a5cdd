#include "firmsim/state.hpp"

namespace firmsim {

SimulationState new_simulation(const SimConfig& cfg) {
    require_valid(cfg);

    SimulationState state;
    state.step = 0;
    state.rng.reseed(static_cast<std::uint64_t>(cfg.seed));
    std::uint64_t move_tag = static_cast<std::uint64_t>(cfg.seed) ^ 0x6c0ff33da7aba5e5ULL;
    state.rng_move.reseed(splitmix64(move_tag));
    state.census = PopulationGrid(cfg.width, cfg.height);
    state.divisions.reserve(static_cast<std::uint64_t>(cfg.initial_divisions));

    const auto delta_old = static_cast<std::uint64_t>(cfg.params_old.delta_max);
    for (std::int64_t i = 0; i < cfg.initial_divisions; ++i) {
        std::uint16_t size = 0;
        if (cfg.init_size_policy == InitSizePolicy::UniformRandom) {
            size = static_cast<std::uint16_t>(state.rng.bounded(delta_old));
        }
        const auto cell = static_cast<std::uint32_t>(i);  // row-major from the origin
        state.divisions.append(DivisionType::Old, size, cell);
        state.census.count_old[cell] += 1;
        state.census.count_total[cell] += 1;
    }
    state.n_old = cfg.initial_divisions;
    state.n_new = 0;
    return state;
}

PopulationGrid census(const SimulationState& state) {
    PopulationGrid grid(state.census.width, state.census.height);
    const auto n = state.divisions.count();
    const auto* cells = state.divisions.cells();
    const auto* types = state.divisions.types();
    for (std::uint64_t i = 0; i < n; ++i) {
        if (types[i] == static_cast<std::uint8_t>(DivisionType::Old)) {
            grid.count_old[cells[i]] += 1;
        } else {
            grid.count_new[cells[i]] += 1;
        }
        grid.count_total[cells[i]] += 1;
    }
    return grid;
}

void census_add(SimulationState& state, DivisionType t, std::uint32_t cell) {
    if (t == DivisionType::Old) {
        state.census.count_old[cell] += 1;
        state.n_old += 1;
    } else {
        state.census.count_new[cell] += 1;
        state.n_new += 1;
    }
    state.census.count_total[cell] += 1;
}

void census_move(SimulationState& state, DivisionType t, std::uint32_t from, std::uint32_t to) {
    auto& by_type = t == DivisionType::Old ? state.census.count_old : state.census.count_new;
    by_type[from] -= 1;
    by_type[to] += 1;
    state.census.count_total[from] -= 1;
    state.census.count_total[to] += 1;
}

void serialize_state(const SimulationState& state, std::ostream& os) {
    os << "step " << state.step << "\nrng ";
    state.rng.dump(os);
    os << "\nrng_move ";
    state.rng_move.dump(os);
    os << "\ndivisions " << state.divisions.count() << '\n';
    for (std::uint64_t i = 0; i < state.divisions.count(); ++i) {
        const Division d = state.division(i);
        os << d.id << ' ' << to_string(d.dtype) << ' ' << d.size << ' ' << d.cell.x << ' ' << d.cell.y << '\n';
    }
}

}  // namespace firmsim
