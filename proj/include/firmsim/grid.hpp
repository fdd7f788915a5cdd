#pragma once

#include <cstdint>
#include <vector>

namespace firmsim {

// A cell address on the landscape. x is the column, y the row.
struct CellId {
    std::int32_t x = 0;
    std::int32_t y = 0;

    friend bool operator==(const CellId&, const CellId&) = default;
};

inline std::uint32_t cell_index(CellId c, int width) {
    return static_cast<std::uint32_t>(c.y) * static_cast<std::uint32_t>(width) +
           static_cast<std::uint32_t>(c.x);
}

inline CellId cell_from_index(std::uint32_t idx, int width) {
    return CellId{static_cast<std::int32_t>(idx % static_cast<std::uint32_t>(width)),
                  static_cast<std::int32_t>(idx / static_cast<std::uint32_t>(width))};
}

// One value per cell, row-major from the origin.
template <typename T>
struct Grid {
    int width = 0;
    int height = 0;
    std::vector<T> values;

    Grid() = default;
    Grid(int w, int h, T fill = T{}) : width(w), height(h), values(static_cast<size_t>(w) * h, fill) {}

    size_t size() const { return values.size(); }
    T& operator[](size_t idx) { return values[idx]; }
    const T& operator[](size_t idx) const { return values[idx]; }
    T& at(CellId c) { return values[cell_index(c, width)]; }
    const T& at(CellId c) const { return values[cell_index(c, width)]; }
};

using ScalarField = Grid<double>;

// Per-cell division counts by type. count_total is maintained as old + new.
struct PopulationGrid {
    int width = 0;
    int height = 0;
    std::vector<std::int64_t> count_old;
    std::vector<std::int64_t> count_new;
    std::vector<std::int64_t> count_total;

    PopulationGrid() = default;
    PopulationGrid(int w, int h)
        : width(w),
          height(h),
          count_old(static_cast<size_t>(w) * h, 0),
          count_new(static_cast<size_t>(w) * h, 0),
          count_total(static_cast<size_t>(w) * h, 0) {}

    size_t cells() const { return count_total.size(); }

    std::int64_t population() const {
        std::int64_t n = 0;
        for (std::int64_t c : count_total) n += c;
        return n;
    }

    friend bool operator==(const PopulationGrid&, const PopulationGrid&) = default;
};

}  // namespace firmsim
