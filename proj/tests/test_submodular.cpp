#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "malsched/submodular.hpp"

#include <cmath>

#include "test_util.hpp"

using namespace malsched;

namespace {

SpeedPtr table_speed(std::map<MachineSet, double> table) {
    return std::make_shared<ExplicitSpeed>(std::move(table));
}

int count_assigned(const PartialAssignment& partial) { return partial.assigned_count; }

}  // namespace

TEST_CASE("greedy_welfare: dominant machines go to their jobs") {
    // Job 0 values machine 0 highly, job 1 values machine 1.
    std::vector<SpeedPtr> oracles = {
        table_speed({{0b01, 5.0}, {0b10, 1.0}, {0b11, 6.0}}),
        table_speed({{0b01, 1.0}, {0b10, 5.0}, {0b11, 6.0}})};
    auto sets = greedy_welfare(oracles, 2);
    CHECK(sets[0] == 0b01);
    CHECK(sets[1] == 0b10);
}

TEST_CASE("greedy_welfare: identical jobs tie-break to the lowest id") {
    std::map<MachineSet, double> additive;
    for (MachineSet s = 1; s < 4; ++s) additive[s] = static_cast<double>(set_size(s));
    std::vector<SpeedPtr> oracles = {table_speed(additive), table_speed(additive)};
    auto sets = greedy_welfare(oracles, 2);
    CHECK(sets[0] == 0b11);  // job 0 wins every tie
    CHECK(sets[1] == 0);
}

TEST_CASE("greedy_welfare reaches half the exhaustive optimum") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        CAPTURE(seed);
        int n = 2 + static_cast<int>(seed % 5);
        int m = 2 + static_cast<int>(seed % 5);
        Instance instance = testutil::viable_family_instance(
            seed % 2 ? "coverage" : "budget_additive", n, m, seed);
        std::vector<SpeedPtr> oracles = instance.speed;

        std::vector<std::vector<double>> tables(n);
        for (int j = 0; j < n; ++j) {
            tables[j].resize(full_set(m) + 1);
            for (MachineSet s = 0; s <= full_set(m); ++s) tables[j][s] = oracles[j]->eval(s);
        }
        double optimum = testutil::exhaustive_welfare(tables, m);

        auto sets = greedy_welfare(oracles, m);
        double value = 0.0;
        for (int j = 0; j < n; ++j) value += oracles[j]->eval(sets[j]);
        CHECK(value >= 0.5 * optimum - 1e-9);

        // Sets stay pairwise disjoint.
        MachineSet seen = 0;
        for (int j = 0; j < n; ++j) {
            CHECK((seen & sets[j]) == 0);
            seen |= sets[j];
        }
    }
}

TEST_CASE("phase_single assigns everything when singles fit loosely") {
    // 3 jobs, 3 machines, unit speeds everywhere.
    std::map<MachineSet, double> ones;
    for (MachineSet s = 1; s < 8; ++s) ones[s] = 1.0;
    Instance instance(3, 3, {table_speed(ones), table_speed(ones), table_speed(ones)});
    PartialAssignment out = phase_single(instance, {0, 1, 2}, 10.0);
    CHECK(count_assigned(out) == 3);
    for (int j = 0; j < 3; ++j) CHECK(set_size(out.sets[j]) == 1);
}

TEST_CASE("phase_single assigns nothing when no singleton fits") {
    std::map<MachineSet, double> slow;
    for (MachineSet s = 1; s < 4; ++s) slow[s] = 0.01;  // f = 100 everywhere
    Instance instance(1, 2, {table_speed(slow)});
    PartialAssignment out = phase_single(instance, {0}, 1.0);
    CHECK(count_assigned(out) == 0);
}

TEST_CASE("phase_single recovers a planted singleton solution at double load") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        Rng rng(seed);
        int m = 3 + static_cast<int>(seed % 4);
        int n = m;  // one job per machine planted
        double level = 1.0;
        std::vector<SpeedPtr> speeds;
        for (int j = 0; j < n; ++j) {
            std::map<MachineSet, double> table;
            for (MachineSet s = 1; s <= full_set(m); ++s) {
                // Planted machine j runs the job exactly at the level; other
                // machines are slower by a random factor.
                double best = set_contains(s, j) ? 1.0 / level : 0.0;
                double alt = 0.0;
                for_each_member(s, [&](int i) {
                    if (i != j) alt = std::max(alt, 0.3 / level);
                });
                table[s] = std::max(best, alt);
            }
            speeds.push_back(table_speed(std::move(table)));
        }
        Instance instance(n, m, std::move(speeds));
        std::vector<int> all(n);
        for (int j = 0; j < n; ++j) all[j] = j;
        PartialAssignment out = phase_single(instance, all, level);
        CHECK(count_assigned(out) >= n);  // the planted solution fits at level C'
        std::vector<double> load(m, 0.0);
        for (int j = 0; j < n; ++j)
            if (out.sets[j])
                load[std::countr_zero(out.sets[j])] += instance.time_of(j, out.sets[j]);
        for (int i = 0; i < m; ++i) CHECK(load[i] <= 2 * level * (1 + 1e-9));
    }
}

TEST_CASE("phase_welfare: a single job keeps its set when fast enough") {
    std::map<MachineSet, double> additive;
    for (MachineSet s = 1; s < 8; ++s) additive[s] = static_cast<double>(set_size(s));
    Instance instance(1, 3, {table_speed(additive)});
    double limit = 1.0;  // g(M) = 3 >= 1/limit
    PartialAssignment out = phase_welfare(instance, {0}, limit);
    REQUIRE(count_assigned(out) == 1);
    CHECK(instance.time_of(0, out.sets[0]) <= 20 * limit * (1 + 1e-9));
}

TEST_CASE("phase_welfare recovers planted disjoint blocks") {
    // Jobs live on disjoint machine blocks; greedy hands each block over.
    const int n = 3;
    std::vector<SpeedPtr> speeds;
    for (int j = 0; j < n; ++j) {
        MachineSet block = MachineSet{0b11} << (2 * j);
        std::map<MachineSet, double> table;
        for (MachineSet s = 1; s <= full_set(6); ++s)
            table[s] = static_cast<double>(set_size(s & block));
        speeds.push_back(table_speed(std::move(table)));
    }
    Instance instance(n, 6, std::move(speeds));
    PartialAssignment out = phase_welfare(instance, {0, 1, 2}, 1.0);
    CHECK(count_assigned(out) == 3);
    for (int j = 0; j < n; ++j) {
        CHECK((out.sets[j] & ~(MachineSet{0b11} << (2 * j))) == 0);
        CHECK(out.sets[j] != 0);
    }
}

TEST_CASE("welfare keeps at least half the exhaustive truncated optimum") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        int n = 2 + static_cast<int>(seed % 4);
        int m = 2 + static_cast<int>(seed % 5);
        Instance instance = testutil::viable_family_instance("coverage", n, m, seed + 500);
        double limit = 2.0 / instance.speed_of(0, full_set(m));
        double cap = 1.0 / limit;

        std::vector<std::vector<double>> tables(n);
        for (int j = 0; j < n; ++j) {
            tables[j].resize(full_set(m) + 1);
            for (MachineSet s = 0; s <= full_set(m); ++s)
                tables[j][s] = std::min(instance.speed_of(j, s), cap);
        }
        double optimum = testutil::exhaustive_welfare(tables, m);

        std::vector<SpeedPtr> truncated;
        for (int j = 0; j < n; ++j)
            truncated.push_back(std::make_shared<TruncatedSpeed>(instance.speed[j], cap));
        auto sets = greedy_welfare(truncated, m);
        double value = 0.0;
        for (int j = 0; j < n; ++j) value += truncated[j]->eval(sets[j]);
        CHECK(value >= 0.5 * optimum - 1e-9);
    }
}

TEST_CASE("run_phase picks the better procedure and meets the quota at OPT") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        CAPTURE(seed);
        int n = 2 + static_cast<int>(seed % 7);
        int m = 2 + static_cast<int>(seed % 4);
        Instance instance = testutil::viable_family_instance(
            seed % 2 ? "coverage" : "budget_additive", n, m, seed + 900);
        MilpResult milp = exact_milp(instance);

        std::vector<int> all(n);
        for (int j = 0; j < n; ++j) all[j] = j;
        PhaseResult phase = run_phase(instance, all, milp.value);
        CHECK(phase.meets_quota);
        int quota = std::max(n - m, (n + 18) / 19);
        CHECK(phase.partial.assigned_count >= quota);
        CHECK(phase.max_load <= 40 * milp.value * (1 + 1e-9));
    }
}

TEST_CASE("run_phase reports infeasibility evidence at absurd levels") {
    Instance instance = testutil::viable_family_instance("coverage", 6, 3, 42);
    MilpResult milp = exact_milp(instance);
    std::vector<int> all = {0, 1, 2, 3, 4, 5};
    PhaseResult phase = run_phase(instance, all, milp.value * 1e-6);
    CHECK_FALSE(phase.meets_quota);
}

TEST_CASE("solve_submodular: single job finishes in one phase") {
    std::map<MachineSet, double> additive;
    for (MachineSet s = 1; s < 8; ++s) additive[s] = static_cast<double>(set_size(s));
    Instance instance(1, 3, {table_speed(additive)});
    SubmodularSolution sol = solve_submodular(instance);
    CHECK(sol.phases == 1);
    CHECK(verify_schedule(instance, sol.schedule).ok);
    // One job, so the load is just its own processing time; the phase keeps
    // it within 40C of the accepted level.
    CHECK(machine_loads(instance, sol.assignment).max_load <= 40 * sol.level * (1 + 1e-9));
}

TEST_CASE("solve_submodular: ratio and phase count stay inside the bounds") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        CAPTURE(seed);
        int n = 2 + static_cast<int>(seed % 7);  // up to 8
        int m = 2 + static_cast<int>(seed % 4);  // up to 5
        const char* families[] = {"coverage", "budget_additive", "matroid_matching"};
        Instance instance =
            testutil::viable_family_instance(families[seed % 3], n, m, seed + 1300);
        MilpResult milp = exact_milp(instance);

        SubmodularSolution sol = solve_submodular(instance);
        CHECK(verify_schedule(instance, sol.schedule).ok);
        double load = machine_loads(instance, sol.assignment).max_load;
        CHECK(load <= 40.0 * sol.phases * milp.value * (1 + 1e-5));
        int phase_cap = static_cast<int>(
            std::ceil(std::log(static_cast<double>(n)) / std::log(19.0 / 18.0)));
        CHECK(sol.phases <= std::max(1, phase_cap));
    }
}

TEST_CASE("solve_identical: pigeonhole coverage of 19 jobs") {
    std::map<MachineSet, double> additive;
    for (MachineSet s = 1; s < 16; ++s) additive[s] = static_cast<double>(set_size(s));
    SpeedPtr shared = table_speed(additive);
    const int n = 19;
    Instance instance(n, 4, std::vector<SpeedPtr>(n, shared));
    IdenticalSolution sol = solve_identical(instance);
    CHECK(verify_schedule(instance, sol.schedule).ok);
    for (int j = 0; j < n; ++j) CHECK(sol.schedule.assignment.sets[j] != 0);
    CHECK(makespan(instance, sol.schedule) <= 800 * sol.level * (1 + 1e-9));
}

TEST_CASE("solve_identical: one job needs one copy") {
    std::map<MachineSet, double> additive;
    for (MachineSet s = 1; s < 4; ++s) additive[s] = static_cast<double>(set_size(s));
    Instance instance(1, 2, {table_speed(additive)});
    IdenticalSolution sol = solve_identical(instance);
    CHECK(verify_schedule(instance, sol.schedule).ok);
    CHECK(makespan(instance, sol.schedule) <= 40 * sol.level * (1 + 1e-9));
}

TEST_CASE("solve_identical enforces the shared-oracle precondition") {
    Instance instance(2, 2, {table_speed({{0b01, 1.0}, {0b10, 1.0}, {0b11, 2.0}}),
                             table_speed({{0b01, 2.0}, {0b10, 2.0}, {0b11, 4.0}})});
    CHECK_THROWS_AS(solve_identical(instance), NotIdenticalError);
}

TEST_CASE("solve_identical schedules random identical-job instances") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        Instance base = testutil::viable_family_instance("coverage", 1, 5, seed + 2900);
        int n = 3 + static_cast<int>(seed % 17);
        Instance instance(n, 5, std::vector<SpeedPtr>(n, base.speed[0]));
        IdenticalSolution sol = solve_identical(instance);
        CHECK(verify_schedule(instance, sol.schedule).ok);
        for (int j = 0; j < n; ++j) CHECK(sol.schedule.assignment.sets[j] != 0);
        CHECK(makespan(instance, sol.schedule) <= 800 * sol.level * (1 + 1e-9));
    }
}
