#pragma once

#include <optional>
#include <vector>

#include "malsched/core.hpp"

namespace malsched {

// Partial assignment: sets[j] == 0 means job j is untouched.
struct PartialAssignment {
    std::vector<MachineSet> sets;
    int assigned_count = 0;
};

// Machines considered in ascending id; each goes to the job with the largest
// marginal gain (ties to the lowest job id, zero gains leave the machine
// unused). Oracles must be monotone submodular for the 1/2 guarantee.
std::vector<MachineSet> greedy_welfare(const std::vector<SpeedPtr>& oracles, int num_machines);

// Single-machine procedure: a maximum-coverage assignment LP (jobs at most
// once, machine loads at most `limit`, pairs slower than `limit` excluded)
// solved to a basic optimum; every job in the LP support is then matched to
// one of its support machines. Per-machine load <= 2 * limit.
PartialAssignment phase_single(const Instance& instance, const std::vector<int>& jobs,
                               double limit);

// Disjoint-sets procedure: welfare greedy on speeds truncated at 1/limit;
// jobs keeping at least 1/(20*limit) of truncated speed stay assigned.
// Kept processing times are <= 20 * limit.
PartialAssignment phase_welfare(const Instance& instance, const std::vector<int>& jobs,
                                double limit);

struct PhaseResult {
    enum class Mode { Single, Welfare };
    Mode mode = Mode::Single;
    PartialAssignment partial;
    double max_load = 0.0;
    // False when neither procedure reached max(|J| - m, ceil(|J|/19)) jobs,
    // which certifies that level C admits no assignment.
    bool meets_quota = false;
};

// Runs both procedures at limit 2C and keeps whichever assigned more jobs
// (ties prefer the single-machine mode).
PhaseResult run_phase(const Instance& instance, const std::vector<int>& jobs, double C);

struct SubmodularSolution {
    Assignment assignment;
    Schedule schedule;
    double level = 0.0;
    int phases = 0;
};

// Phased heuristic under a relaxed-decision binary search. At an accepted
// level every phase assigns a constant fraction of the remaining jobs at
// load <= 40C, and per-phase schedules are stacked back to back, so the
// total load and makespan are bounded by 40C times the phase count.
SubmodularSolution solve_submodular(const Instance& instance, double rel_tol = 1e-6);

struct IdenticalSolution {
    Schedule schedule;
    double level = 0.0;
};

// All jobs share one speed oracle: one phase is enough, replicated twenty
// times back to back with job identities filled round-robin.
// NotIdenticalError when oracles differ.
IdenticalSolution solve_identical(const Instance& instance, double rel_tol = 1e-6);

}  // namespace malsched
