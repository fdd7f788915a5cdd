#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "firmsim/dynamics.hpp"
#include "firmsim/presets.hpp"

using namespace firmsim;

namespace {

// A small, fast landscape for engine tests.
SimConfig small_config() {
    SimConfig cfg = preset(4).config;
    cfg.width = 12;
    cfg.height = 12;
    cfg.initial_divisions = 100;
    cfg.params_old.delta_max = 10;
    cfg.params_new.delta_max = 5;
    cfg.steps = 40;
    cfg.metric_distance = 3.0;
    cfg.seed = 42;
    return cfg;
}

std::string dump(const SimulationState& state) {
    std::ostringstream os;
    serialize_state(state, os);
    return os.str();
}

std::string cells_of(const SimulationState& state) {
    std::ostringstream os;
    for (std::uint64_t i = 0; i < state.divisions.count(); ++i) os << state.divisions.cell_of(i) << ' ';
    return os.str();
}

}  // namespace

TEST_CASE("growth adds one unit to every division") {
    SimConfig cfg = small_config();
    cfg.init_size_policy = InitSizePolicy::Zero;
    SimulationState state = new_simulation(cfg);
    state.divisions.set_size(3, 5);
    grow_divisions(state);
    CHECK(state.division(3).size == 6);
    CHECK(state.division(0).size == 1);
    std::int64_t total = 0;
    for (std::uint64_t i = 0; i < state.divisions.count(); ++i) total += state.division(i).size;
    CHECK(total == 100 + 5);  // one unit each, plus the preset size
}

TEST_CASE("an old division above its cap splits into an old child") {
    SimConfig cfg = small_config();
    cfg.params_old.delta_max = 50;
    cfg.initial_divisions = 1;
    cfg.phi = 1.0;
    SimulationState state = new_simulation(cfg);
    state.divisions.set_size(0, 51);

    const SpinoffSummary s = process_spinoffs(state, cfg);
    CHECK(s.children_old == 1);
    CHECK(s.children_new == 0);
    REQUIRE(state.divisions.count() == 2);
    CHECK(state.division(0).size == 0);
    CHECK(state.division(1).dtype == DivisionType::Old);
    CHECK(state.division(1).size == 0);
    CHECK(state.division(1).cell == state.division(0).cell);
    CHECK(state.census.count_old[0] == 2);
}

TEST_CASE("a new division above its cap splits into a new child") {
    SimConfig cfg = small_config();
    cfg.params_new.delta_max = 10;
    cfg.initial_divisions = 1;
    SimulationState state = new_simulation(cfg);
    state.divisions.set_type(0, DivisionType::New);
    state.divisions.set_size(0, 11);
    state.census.count_old[0] -= 1;
    state.census.count_new[0] += 1;
    state.n_old -= 1;
    state.n_new += 1;

    const SpinoffSummary s = process_spinoffs(state, cfg);
    CHECK(s.children_new == 1);
    REQUIRE(state.divisions.count() == 2);
    CHECK(state.division(1).dtype == DivisionType::New);
    CHECK(state.division(0).size == 0);
}

TEST_CASE("an old division exactly at its cap switches type with probability phi") {
    SimConfig cfg = small_config();
    cfg.params_old.delta_max = 50;
    cfg.initial_divisions = 1;
    SimulationState state = new_simulation(cfg);
    state.divisions.set_size(0, 50);

    SUBCASE("phi = 1 forces the new-type spin-off") {
        cfg.phi = 1.0;
        const SpinoffSummary s = process_spinoffs(state, cfg);
        CHECK(s.children_new == 1);
        CHECK(s.children_old == 0);
        REQUIRE(state.divisions.count() == 2);
        CHECK(state.division(1).dtype == DivisionType::New);
        CHECK(state.division(0).dtype == DivisionType::Old);  // the parent keeps its type
        CHECK(state.division(0).size == 0);
    }
    SUBCASE("phi = 0 leaves the division growing") {
        cfg.phi = 0.0;
        const SpinoffSummary s = process_spinoffs(state, cfg);
        CHECK(s.children_old == 0);
        CHECK(s.children_new == 0);
        CHECK(state.divisions.count() == 1);
        CHECK(state.division(0).size == 50);
    }
}

TEST_CASE("the fused growth and spin-off pass matches the two standalone ops") {
    SimConfig cfg = small_config();
    cfg.phi = 0.35;
    SimulationState split_path = new_simulation(cfg);
    SimulationState fused_path = new_simulation(cfg);
    for (int s = 0; s < 60; ++s) {
        grow_divisions(split_path);
        const SpinoffSummary a = process_spinoffs(split_path, cfg);
        const SpinoffSummary b = grow_and_spinoff(fused_path, cfg);
        CHECK(a.children_old == b.children_old);
        CHECK(a.children_new == b.children_new);
    }
    CHECK(dump(split_path) == dump(fused_path));
}

TEST_CASE("degenerate lotteries always pick their branch") {
    Rng rng(1);
    for (int i = 0; i < 500; ++i) {
        CHECK(classify_relocation(rng, 1.0, 1.0) == RelocationDraw::Stay);
        CHECK(classify_relocation(rng, 0.0, 0.0) == RelocationDraw::EvaluateVacant);
        CHECK(classify_relocation(rng, 0.0, 1.0) == RelocationDraw::EvaluateExisting);
    }
}

TEST_CASE("lottery frequencies match the text probabilities within three sigma") {
    Rng rng(2024);
    const int n = 100'000;
    int stay = 0, existing = 0, vacant = 0;
    for (int i = 0; i < n; ++i) {
        switch (classify_relocation(rng, 0.9, 0.99)) {
            case RelocationDraw::Stay: ++stay; break;
            case RelocationDraw::EvaluateExisting: ++existing; break;
            case RelocationDraw::EvaluateVacant: ++vacant; break;
        }
    }
    auto within = [n](int count, double p) {
        const double sigma = std::sqrt(p * (1.0 - p) / n);
        return std::abs(static_cast<double>(count) / n - p) <= 3.0 * sigma;
    };
    CHECK(within(stay, 0.9));
    CHECK(within(existing, 0.09));
    CHECK(within(vacant, 0.01));
}

namespace {

// 1x5 strip with chosen occupancy and utilities, for destination tests.
struct Strip {
    PopulationGrid census{5, 1};
    UtilityField utility;

    Strip(std::vector<std::int64_t> counts, std::vector<double> utils) {
        for (size_t i = 0; i < 5; ++i) {
            census.count_old[i] = counts[i];
            census.count_total[i] = counts[i];
        }
        utility.dtype = DivisionType::Old;
        utility.values = ScalarField(5, 1);
        utility.values.values = std::move(utils);
    }
};

}  // namespace

TEST_CASE("argmax moves to a strictly better occupied cell") {
    // current cell 0 (u=1.5), candidate cell 2 best at 2.0
    Strip strip({1, 1, 1, 1, 0}, {1.5, 1.0, 2.0, 1.0, 0.0});
    Rng rng(1);
    const MoveDecision d = select_destination(strip.census, strip.utility, {0, 0},
                                              RelocationDraw::EvaluateExisting, SelectionMode::ArgmaxImprove, rng);
    CHECK(d.kind == MoveDecision::Kind::Move);
    CHECK(d.destination == CellId{2, 0});
}

TEST_CASE("argmax stays when no candidate improves on the current cell") {
    Strip strip({1, 1, 1, 1, 0}, {1.5, 1.0, 1.4, 1.2, 0.0});
    Rng rng(1);
    const MoveDecision d = select_destination(strip.census, strip.utility, {0, 0},
                                              RelocationDraw::EvaluateExisting, SelectionMode::ArgmaxImprove, rng);
    CHECK(d.kind == MoveDecision::Kind::Stay);
}

TEST_CASE("argmax breaks exact ties uniformly") {
    Strip strip({1, 1, 1, 1, 0}, {0.5, 2.0, 2.0, 2.0, 0.0});
    DestinationChooser chooser(strip.census, strip.utility, SelectionMode::ArgmaxImprove);
    Rng rng(9);
    int hits[5] = {0, 0, 0, 0, 0};
    const int n = 3000;
    for (int i = 0; i < n; ++i) {
        const MoveDecision d = chooser.decide(0, RelocationDraw::EvaluateExisting, rng);
        REQUIRE(d.kind == MoveDecision::Kind::Move);
        hits[cell_index(d.destination, 5)] += 1;
    }
    CHECK(hits[0] == 0);
    CHECK(hits[4] == 0);
    for (int c = 1; c <= 3; ++c) {
        CHECK(hits[c] > n / 3 - 5 * std::sqrt(n));  // ~3 sigma around n/3
        CHECK(hits[c] < n / 3 + 5 * std::sqrt(n));
    }
}

TEST_CASE("vacant relocation with no vacant cell resolves to no-candidates") {
    Strip strip({1, 2, 1, 1, 3}, {1.0, 1.0, 1.0, 1.0, 1.0});
    Rng rng(1);
    const MoveDecision d = select_destination(strip.census, strip.utility, {0, 0},
                                              RelocationDraw::EvaluateVacant, SelectionMode::ArgmaxImprove, rng);
    CHECK(d.kind == MoveDecision::Kind::NoCandidates);
}

TEST_CASE("existing relocation with no other occupied cell resolves to no-candidates") {
    Strip strip({3, 0, 0, 0, 0}, {1.0, 5.0, 5.0, 5.0, 5.0});
    Rng rng(1);
    for (SelectionMode mode : {SelectionMode::ArgmaxImprove, SelectionMode::LogitSample}) {
        const MoveDecision d =
            select_destination(strip.census, strip.utility, {0, 0}, RelocationDraw::EvaluateExisting, mode, rng);
        CHECK(d.kind == MoveDecision::Kind::NoCandidates);
    }
}

TEST_CASE("logit sampling always moves and never picks the mover's own cell") {
    Strip strip({1, 1, 1, 0, 1}, {3.0, 1.0, 0.5, 0.0, 0.2});
    DestinationChooser chooser(strip.census, strip.utility, SelectionMode::LogitSample);
    Rng rng(31);
    for (int i = 0; i < 2000; ++i) {
        const MoveDecision d = chooser.decide(0, RelocationDraw::EvaluateExisting, rng);
        REQUIRE(d.kind == MoveDecision::Kind::Move);
        CHECK(d.destination != CellId{0, 0});
        CHECK(d.destination != CellId{3, 0});  // vacant, not a candidate here
    }
}

TEST_CASE("sampled destination frequencies are proportional to utility") {
    Strip strip({1, 1, 1, 0, 1}, {9.0, 1.0, 0.5, 0.0, 0.2});  // mover sits in the top cell
    DestinationChooser chooser(strip.census, strip.utility, SelectionMode::LogitSample);
    Rng rng(77);
    const int n = 20'000;
    int hits[5] = {0, 0, 0, 0, 0};
    for (int i = 0; i < n; ++i) {
        const MoveDecision d = chooser.decide(0, RelocationDraw::EvaluateExisting, rng);
        hits[cell_index(d.destination, 5)] += 1;
    }
    // candidates are cells 1, 2, 4 weighted by their utilities 1 : 0.5 : 0.2
    const double total = 1.0 + 0.5 + 0.2;
    auto within = [n](int count, double p) {
        const double sigma = std::sqrt(p * (1.0 - p) / n);
        return std::abs(static_cast<double>(count) / n - p) <= 4.0 * sigma;
    };
    CHECK(hits[0] == 0);
    CHECK(hits[3] == 0);
    CHECK(within(hits[1], 1.0 / total));
    CHECK(within(hits[2], 0.5 / total));
    CHECK(within(hits[4], 0.2 / total));
}

TEST_CASE("sampling over candidates without positive utility is uniform") {
    Strip strip({1, 1, 1, 0, 1}, {2.0, 0.0, -1.0, 0.0, 0.0});
    DestinationChooser chooser(strip.census, strip.utility, SelectionMode::LogitSample);
    Rng rng(13);
    const int n = 9000;
    int hits[5] = {0, 0, 0, 0, 0};
    for (int i = 0; i < n; ++i) {
        const MoveDecision d = chooser.decide(0, RelocationDraw::EvaluateExisting, rng);
        REQUIRE(d.kind == MoveDecision::Kind::Move);
        hits[cell_index(d.destination, 5)] += 1;
    }
    CHECK(hits[0] == 0);
    CHECK(hits[3] == 0);
    for (int c : {1, 2, 4}) {
        CHECK(hits[c] > n / 3 - 5 * std::sqrt(n));
        CHECK(hits[c] < n / 3 + 5 * std::sqrt(n));
    }
}

TEST_CASE("logit vacant sampling is uniform on a flat utility surface") {
    Strip strip({1, 0, 0, 1, 0}, {0.0, 0.0, 0.0, 0.0, 0.0});
    DestinationChooser chooser(strip.census, strip.utility, SelectionMode::LogitSample);
    Rng rng(5);
    const int n = 9000;
    int hits[5] = {0, 0, 0, 0, 0};
    for (int i = 0; i < n; ++i) {
        const MoveDecision d = chooser.decide(0, RelocationDraw::EvaluateVacant, rng);
        REQUIRE(d.kind == MoveDecision::Kind::Move);
        hits[cell_index(d.destination, 5)] += 1;
    }
    CHECK(hits[0] == 0);
    CHECK(hits[3] == 0);
    for (int c : {1, 2, 4}) {
        CHECK(hits[c] > n / 3 - 5 * std::sqrt(n));
        CHECK(hits[c] < n / 3 + 5 * std::sqrt(n));
    }
}

TEST_CASE("a stay-only lottery leaves every position unchanged") {
    SimConfig cfg = small_config();
    cfg.lambda1 = 1.0;
    cfg.lambda2 = 0.0;
    cfg.lambda3 = 0.0;
    cfg.phi = 0.0;
    cfg.init_size_policy = InitSizePolicy::Zero;  // no splits inside the observed step
    Simulation sim(cfg);
    const std::string before = cells_of(sim.state());
    const StepReport r = sim.step();
    CHECK(cells_of(sim.state()) == before);
    CHECK(r.n_moves_existing == 0);
    CHECK(r.n_moves_vacant == 0);
}

TEST_CASE("step reports are reproducible for a fixed seed") {
    const SimConfig cfg = small_config();
    Simulation a(cfg), b(cfg);
    for (int s = 0; s < 15; ++s) {
        const StepReport ra = a.step();
        const StepReport rb = b.step();
        CHECK(ra.n_old == rb.n_old);
        CHECK(ra.n_new == rb.n_new);
        CHECK(ra.n_moves_existing == rb.n_moves_existing);
        CHECK(ra.n_moves_vacant == rb.n_moves_vacant);
        CHECK(ra.n_stays == rb.n_stays);
        CHECK(ra.l_index == rb.l_index);
    }
    CHECK(dump(a.state()) == dump(b.state()));
}

TEST_CASE("step counters add up and the census stays consistent") {
    Simulation sim(small_config());
    for (int s = 0; s < 20; ++s) {
        const StepReport r = sim.step();
        const std::int64_t count = static_cast<std::int64_t>(sim.state().divisions.count());
        CHECK(r.n_old + r.n_new == count);
        CHECK(r.n_stays + r.n_no_candidates + r.n_moves_existing + r.n_moves_vacant == count);
        CHECK(census(sim.state()) == sim.state().census);
    }
}

TEST_CASE("early spin-off rate under uniform size initialization") {
    // Uniform sizes over [0, 50) put about 1/50 of the old stock at the cap
    // each step, so about 2500/50 = 50 old children per step once the first
    // cohort has crossed it.
    SimConfig cfg = preset(1).config;
    cfg.steps = 0;
    double child_steps = 0.0;
    const int seeds = 20, steps = 10;
    for (int seed = 0; seed < seeds; ++seed) {
        cfg.seed = seed;
        Simulation sim(cfg);
        for (int s = 0; s < steps; ++s) child_steps += static_cast<double>(sim.step().n_spinoffs_old);
    }
    const double mean_per_step = child_steps / (seeds * steps);
    CHECK(mean_per_step > 35.0);
    CHECK(mean_per_step < 60.0);
}

TEST_CASE("a run never loses divisions and keeps sizes within their caps") {
    SimConfig cfg = small_config();
    Simulation sim(cfg);
    std::int64_t previous = cfg.initial_divisions;
    for (int s = 0; s < cfg.steps; ++s) {
        const StepReport r = sim.step();
        CHECK(r.n_old + r.n_new >= previous);
        previous = r.n_old + r.n_new;
        for (std::uint64_t i = 0; i < sim.state().divisions.count(); ++i) {
            const Division d = sim.state().division(i);
            const std::int64_t cap =
                d.dtype == DivisionType::Old ? cfg.params_old.delta_max : cfg.params_new.delta_max;
            CHECK(d.size >= 0);
            CHECK(d.size <= cap);
        }
    }
}

TEST_CASE("phi zero keeps the population old-only") {
    SimConfig cfg = small_config();
    cfg.phi = 0.0;
    const RunResult result = run(cfg);
    CHECK(result.final_state.n_new == 0);
    for (const StepReport& r : result.reports) CHECK(r.n_new == 0);
}

TEST_CASE("a stay-only run keeps the spatial pattern frozen") {
    SimConfig cfg = small_config();
    cfg.lambda1 = 1.0;
    cfg.lambda2 = 0.0;
    cfg.lambda3 = 0.0;
    Simulation sim(cfg);
    const PopulationGrid initial = sim.state().census;
    for (int s = 0; s < 30; ++s) sim.step();
    // counts grow in place, but occupancy never changes
    for (size_t i = 0; i < initial.cells(); ++i) {
        CHECK((initial.count_total[i] > 0) == (sim.state().census.count_total[i] > 0));
    }
}

TEST_CASE("zero steps yield an empty report list") {
    SimConfig cfg = small_config();
    cfg.steps = 0;
    const RunResult result = run(cfg);
    CHECK(result.reports.empty());
    CHECK(result.final_state.step == 0);
    CHECK(result.final_state.divisions.count() == 100);
}

TEST_CASE("runs with the same seed are identical, different seeds differ") {
    SimConfig cfg = small_config();
    const RunResult a = run(cfg);
    const RunResult b = run(cfg);
    CHECK(dump(a.final_state) == dump(b.final_state));
    REQUIRE(a.reports.size() == b.reports.size());
    for (size_t i = 0; i < a.reports.size(); ++i) {
        CHECK(a.reports[i].l_index == b.reports[i].l_index);
        CHECK(a.reports[i].realized_growth_rate == b.reports[i].realized_growth_rate);
    }

    cfg.seed = 43;
    const RunResult c = run(cfg);
    CHECK(dump(c.final_state) != dump(a.final_state));
}

TEST_CASE("division count grows under every preset's dynamics") {
    SimConfig cfg = small_config();
    cfg.steps = 35;
    const RunResult result = run(cfg);
    CHECK(result.final_state.n_old + result.final_state.n_new > 100);
}

TEST_CASE("an isolated old division spawns exactly on its cap cycle") {
    SimConfig cfg;
    cfg.width = 8;
    cfg.height = 8;
    cfg.initial_divisions = 1;
    cfg.init_size_policy = InitSizePolicy::Zero;
    cfg.phi = 0.0;
    cfg.lambda1 = 1.0;
    cfg.lambda2 = 0.0;
    cfg.lambda3 = 0.0;
    cfg.params_old.delta_max = 50;
    cfg.params_new.delta_max = 10;
    cfg.metric_distance = 2.0;
    cfg.steps = 0;
    Simulation sim(cfg);
    for (int t = 1; t <= 160; ++t) {
        const StepReport r = sim.step();
        const auto expected = static_cast<std::int64_t>(1) << (t / 51);  // doubles at 51, 102, 153
        CHECK(r.n_old == expected);
    }
}

TEST_CASE("an isolated new division spawns with period eleven") {
    SimConfig cfg;
    cfg.width = 8;
    cfg.height = 8;
    cfg.initial_divisions = 1;
    cfg.init_size_policy = InitSizePolicy::Zero;
    cfg.phi = 0.0;
    cfg.lambda1 = 1.0;
    cfg.lambda2 = 0.0;
    cfg.lambda3 = 0.0;
    cfg.params_new.delta_max = 10;
    cfg.metric_distance = 2.0;
    cfg.steps = 0;
    Simulation sim(cfg);
    auto& state = sim.state();
    state.divisions.set_type(0, DivisionType::New);
    state.census.count_old[0] -= 1;
    state.census.count_new[0] += 1;
    state.n_old -= 1;
    state.n_new += 1;
    for (int t = 1; t <= 34; ++t) {
        const StepReport r = sim.step();
        const auto expected = static_cast<std::int64_t>(1) << (t / 11);  // doubles at 11, 22, 33
        CHECK(r.n_new == expected);
        CHECK(r.n_old == 0);
    }
}
