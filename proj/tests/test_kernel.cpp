#include <doctest.h>

#include <cmath>

#include "firmsim/grid.hpp"
#include "firmsim/kernel.hpp"
#include "firmsim/rng.hpp"

using namespace firmsim;

TEST_CASE("self weight is exactly one") {
    const DecayKernel k = build_decay_kernel(6, 4, 0.7);
    for (std::uint32_t i = 0; i < k.cells(); ++i) CHECK(k.at(i, i) == 1.0);
}

TEST_CASE("weight at distance five matches the closed form") {
    // cells (0,0) and (3,4) on a 5x5 grid: d = 5, alpha = 0.5
    const DecayKernel k = build_decay_kernel(5, 5, 0.5);
    const std::uint32_t a = cell_index({0, 0}, 5);
    const std::uint32_t b = cell_index({3, 4}, 5);
    CHECK(k.at(a, b) == doctest::Approx(std::exp(-2.5)).epsilon(1e-12));
    CHECK(k.at(a, b) == doctest::Approx(0.0820850).epsilon(1e-6));
}

TEST_CASE("weights are symmetric and lie in (0, 1]") {
    const DecayKernel k = build_decay_kernel(7, 5, 0.3);
    const std::uint32_t a = cell_index({1, 2}, 7);
    const std::uint32_t b = cell_index({4, 4}, 7);
    CHECK(k.at(a, b) == k.at(b, a));

    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const auto i = static_cast<std::uint32_t>(rng.bounded(k.cells()));
        const auto j = static_cast<std::uint32_t>(rng.bounded(k.cells()));
        CHECK(k.at(i, j) == k.at(j, i));
        CHECK(k.at(i, j) > 0.0);
        CHECK(k.at(i, j) <= 1.0);
    }
}

TEST_CASE("kernel refuses grids beyond the cell budget") {
    CHECK_THROWS_AS(build_decay_kernel(51, 50, 0.5), std::length_error);
    CHECK_NOTHROW(build_decay_kernel(50, 50, 0.5));
    CHECK_NOTHROW(build_decay_kernel(51, 50, 0.5, 51 * 50));
}

TEST_CASE("kernel rejects non-positive alpha") {
    CHECK_THROWS_AS(build_decay_kernel(5, 5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_decay_kernel(5, 5, -0.5), std::invalid_argument);
}

TEST_CASE("kernel set shares matrices with equal alpha") {
    const TypeParams old_p{0.5, 0.5, 0.5, 1.0, 0.5, -1.0, 50};
    const TypeParams new_p{0.4, 0.4, 0.4, 1.0, 0.5, -1.0, 10};
    const KernelSet set(10, 10, old_p, new_p);
    CHECK(&set.mp(DivisionType::Old) == &set.ap(DivisionType::Old));
    CHECK(&set.mp(DivisionType::Old) == &set.cp(DivisionType::Old));
    CHECK(&set.mp(DivisionType::New) == &set.cp(DivisionType::New));
    CHECK(&set.mp(DivisionType::Old) != &set.mp(DivisionType::New));
    CHECK(set.mp(DivisionType::Old).alpha == 0.5);
    CHECK(set.ap(DivisionType::New).alpha == 0.4);
}
