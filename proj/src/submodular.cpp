#include "malsched/submodular.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "malsched/flow.hpp"
#include "malsched/lp.hpp"

namespace malsched {

std::vector<MachineSet> greedy_welfare(const std::vector<SpeedPtr>& oracles, int num_machines) {
    const int n = static_cast<int>(oracles.size());
    std::vector<MachineSet> sets(n, 0);
    std::vector<double> value(n, 0.0);
    for (int i = 0; i < num_machines; ++i) {
        int best_job = -1;
        double best_gain = 0.0;
        for (int j = 0; j < n; ++j) {
            double gain = oracles[j]->eval(set_with(sets[j], i)) - value[j];
            if (gain < -1e-9)
                throw SchedError("greedy_welfare: negative marginal; oracle is not monotone");
            if (gain > best_gain + 1e-12) {
                best_gain = gain;
                best_job = j;
            }
        }
        if (best_job >= 0 && best_gain > 1e-12) {
            sets[best_job] = set_with(sets[best_job], i);
            value[best_job] += best_gain;
        }
    }
    return sets;
}

PartialAssignment phase_single(const Instance& instance, const std::vector<int>& jobs,
                               double limit) {
    PartialAssignment out;
    out.sets.assign(instance.num_jobs, 0);

    LinearProgram lp;
    lp.maximize = true;
    std::vector<std::pair<int, int>> vars;
    std::vector<std::vector<std::pair<int, double>>> machine_terms(instance.num_machines);
    for (int j : jobs) {
        std::vector<std::pair<int, double>> job_terms;
        for (int i = 0; i < instance.num_machines; ++i) {
            double g = instance.speed_of(j, singleton(i));
            if (!(g > 0.0) || 1.0 / g > limit) continue;
            int v = lp.add_var(1.0);
            vars.emplace_back(j, i);
            job_terms.emplace_back(v, 1.0);
            machine_terms[i].emplace_back(v, 1.0 / g);
        }
        if (!job_terms.empty())
            lp.add_row(std::move(job_terms), LinearProgram::Sense::LessEq, 1.0);
    }
    if (vars.empty()) return out;
    for (int i = 0; i < instance.num_machines; ++i)
        if (!machine_terms[i].empty())
            lp.add_row(std::move(machine_terms[i]), LinearProgram::Sense::LessEq, limit);

    BasicSolution sol = solve_lp(lp);
    if (sol.status != BasicSolution::Status::Optimal)
        throw NumericFailureError("phase_single: coverage LP did not solve");

    // Keep integral picks, then match every remaining support job to one of
    // its support machines; machines hold at most one integral load of
    // `limit` plus one matched job, hence 2 * limit total.
    std::vector<char> machine_taken(instance.num_machines, 0);
    std::vector<std::vector<int>> support(instance.num_jobs);
    for (size_t v = 0; v < vars.size(); ++v) {
        auto [j, i] = vars[v];
        if (sol.values[v] >= 1.0 - 1e-7) {
            out.sets[j] = singleton(i);
            ++out.assigned_count;
        } else if (sol.values[v] > 1e-9) {
            support[j].push_back(i);
        }
    }
    std::vector<int> open_jobs;
    for (int j : jobs)
        if (out.sets[j] == 0 && !support[j].empty()) open_jobs.push_back(j);

    std::vector<std::vector<int>> adjacency;
    adjacency.reserve(open_jobs.size());
    for (int j : open_jobs) adjacency.push_back(support[j]);
    std::vector<int> matched = max_bipartite_matching(adjacency, instance.num_machines);
    for (size_t idx = 0; idx < open_jobs.size(); ++idx) {
        if (matched[idx] < 0)
            throw AuditError("phase_single: support job left unmatched");
        out.sets[open_jobs[idx]] = singleton(matched[idx]);
        ++out.assigned_count;
    }
    (void)machine_taken;
    return out;
}

PartialAssignment phase_welfare(const Instance& instance, const std::vector<int>& jobs,
                                double limit) {
    const double cap = 1.0 / limit;
    std::vector<SpeedPtr> truncated;
    truncated.reserve(jobs.size());
    for (int j : jobs)
        truncated.push_back(std::make_shared<TruncatedSpeed>(instance.speed[j], cap));

    std::vector<MachineSet> sets = greedy_welfare(truncated, instance.num_machines);

    PartialAssignment out;
    out.sets.assign(instance.num_jobs, 0);
    const double keep_threshold = cap / 20.0;
    for (size_t idx = 0; idx < jobs.size(); ++idx) {
        if (sets[idx] == 0) continue;
        double h = truncated[idx]->eval(sets[idx]);
        if (h >= keep_threshold * (1 - 1e-12)) {
            out.sets[jobs[idx]] = sets[idx];
            ++out.assigned_count;
        }
    }
    return out;
}

PhaseResult run_phase(const Instance& instance, const std::vector<int>& jobs, double C) {
    PartialAssignment single = phase_single(instance, jobs, 2.0 * C);
    PartialAssignment welfare = phase_welfare(instance, jobs, 2.0 * C);

    PhaseResult result;
    if (single.assigned_count >= welfare.assigned_count) {
        result.mode = PhaseResult::Mode::Single;
        result.partial = std::move(single);
    } else {
        result.mode = PhaseResult::Mode::Welfare;
        result.partial = std::move(welfare);
    }

    std::vector<double> load(instance.num_machines, 0.0);
    for (int j = 0; j < instance.num_jobs; ++j) {
        MachineSet s = result.partial.sets[j];
        if (s == 0) continue;
        double f = instance.time_of(j, s);
        for_each_member(s, [&](int i) { load[i] += f; });
    }
    for (double l : load) result.max_load = std::max(result.max_load, l);

    int total = static_cast<int>(jobs.size());
    int quota = std::max(total - instance.num_machines,
                         (total + 18) / 19);  // ceil(total / 19)
    result.meets_quota = result.partial.assigned_count >= quota;
    return result;
}

namespace {

struct PhasedRun {
    Assignment assignment;
    Schedule schedule;
    int phases = 0;
    std::vector<double> phase_loads;
};

// Runs phases until every job is covered; nullopt when some phase misses the
// quota (evidence that level C is infeasible). Per-phase schedules are
// stacked sequentially: welfare jobs run in parallel on disjoint sets at the
// phase start, singleton chains follow per machine.
std::optional<PhasedRun> phased_decision(const Instance& instance, double C) {
    PhasedRun run;
    run.assignment.sets.assign(instance.num_jobs, 0);
    run.schedule.assignment.sets.assign(instance.num_jobs, 0);
    run.schedule.starts.assign(instance.num_jobs, 0.0);

    std::vector<int> remaining(instance.num_jobs);
    for (int j = 0; j < instance.num_jobs; ++j) remaining[j] = j;

    double clock = 0.0;
    while (!remaining.empty()) {
        PhaseResult phase = run_phase(instance, remaining, C);
        if (!phase.meets_quota || phase.partial.assigned_count == 0) return std::nullopt;
        ++run.phases;
        run.phase_loads.push_back(phase.max_load);

        std::vector<double> machine_free(instance.num_machines, clock);
        // Multi-machine (welfare) jobs first, then singleton chains in job-id
        // order; disjointness keeps the phase internally feasible.
        for (int j = 0; j < instance.num_jobs; ++j) {
            MachineSet s = phase.partial.sets[j];
            if (set_size(s) <= 1) continue;
            run.assignment.sets[j] = s;
            run.schedule.assignment.sets[j] = s;
            run.schedule.starts[j] = clock;
            double f = instance.time_of(j, s);
            for_each_member(s, [&](int i) { machine_free[i] = clock + f; });
        }
        for (int j = 0; j < instance.num_jobs; ++j) {
            MachineSet s = phase.partial.sets[j];
            if (set_size(s) != 1) continue;
            int i = std::countr_zero(s);
            run.assignment.sets[j] = s;
            run.schedule.assignment.sets[j] = s;
            run.schedule.starts[j] = machine_free[i];
            machine_free[i] += instance.time_of(j, s);
        }
        clock = *std::max_element(machine_free.begin(), machine_free.end());

        std::vector<int> next;
        for (int j : remaining)
            if (phase.partial.sets[j] == 0) next.push_back(j);
        remaining = std::move(next);
    }
    return run;
}

}  // namespace

SubmodularSolution solve_submodular(const Instance& instance, double rel_tol) {
    // Monotone-speed search window: no job can beat its full-set time, and
    // running every job alone on a greedily built set is always feasible.
    double lo = 0.0, hi = 0.0;
    for (int j = 0; j < instance.num_jobs; ++j) {
        double g_full = instance.speed_of(j, full_set(instance.num_machines));
        if (!(g_full > 0.0))
            throw ZeroSpeedError("job " + std::to_string(j) + " cannot run on any machine set");
        lo = std::max(lo, 1.0 / g_full);

        MachineSet built = 0;
        double value = 0.0;
        for (;;) {
            int best = -1;
            double best_gain = 1e-12;
            for (int i = 0; i < instance.num_machines; ++i) {
                if (set_contains(built, i)) continue;
                double gain = instance.speed_of(j, set_with(built, i)) - value;
                if (gain > best_gain) {
                    best_gain = gain;
                    best = i;
                }
            }
            if (best < 0) break;
            built = set_with(built, best);
            value += best_gain;
        }
        hi += 1.0 / instance.speed_of(j, built);
    }
    hi = std::max(hi, lo);

    std::function<std::optional<PhasedRun>(double)> proc =
        [&](double C) { return phased_decision(instance, C); };
    auto [level, run] = binary_search_decision<PhasedRun>(proc, lo, hi, rel_tol);

    double bound = 40.0 * level * run.phases;
    if (machine_loads(instance, run.assignment).max_load > bound * (1 + 1e-9))
        throw AuditError("solve_submodular: load exceeds 40C per phase");
    if (makespan(instance, run.schedule) > bound * (1 + 1e-9))
        throw AuditError("solve_submodular: makespan exceeds 40C per phase");

    SubmodularSolution solution;
    solution.assignment = std::move(run.assignment);
    solution.schedule = std::move(run.schedule);
    solution.level = level;
    solution.phases = run.phases;
    return solution;
}

IdenticalSolution solve_identical(const Instance& instance, double rel_tol) {
    for (int j = 1; j < instance.num_jobs; ++j) {
        if (instance.speed[j] != instance.speed[0] &&
            instance.speed[j]->to_json() != instance.speed[0]->to_json())
            throw NotIdenticalError("solve_identical: jobs do not share one speed oracle");
    }

    const int n = instance.num_jobs;
    std::vector<int> all_jobs(n);
    for (int j = 0; j < n; ++j) all_jobs[j] = j;

    struct OnePhase {
        PhaseResult phase;
    };
    std::function<std::optional<OnePhase>(double)> proc =
        [&](double C) -> std::optional<OnePhase> {
        PhaseResult phase = run_phase(instance, all_jobs, C);
        if (!phase.meets_quota || phase.partial.assigned_count == 0) return std::nullopt;
        return OnePhase{std::move(phase)};
    };

    double lo = 0.0, hi = 0.0;
    {
        double g_full = instance.speed_of(0, full_set(instance.num_machines));
        if (!(g_full > 0.0)) throw ZeroSpeedError("jobs cannot run on any machine set");
        lo = 1.0 / g_full;
        hi = n / g_full;
    }
    auto [level, accepted] = binary_search_decision<OnePhase>(proc, lo, hi, rel_tol);

    // Slots of the accepted phase, replicated; jobs are interchangeable, so
    // identities fill the copies round-robin and leftover slots are dropped.
    struct Slot {
        MachineSet set;
        double start;
    };
    std::vector<Slot> slots;
    {
        std::vector<double> machine_free(instance.num_machines, 0.0);
        for (int j = 0; j < n; ++j) {
            MachineSet s = accepted.phase.partial.sets[j];
            if (set_size(s) <= 1) continue;
            slots.push_back({s, 0.0});
            double f = instance.time_of(0, s);
            for_each_member(s, [&](int i) { machine_free[i] = f; });
        }
        for (int j = 0; j < n; ++j) {
            MachineSet s = accepted.phase.partial.sets[j];
            if (set_size(s) != 1) continue;
            int i = std::countr_zero(s);
            slots.push_back({s, machine_free[i]});
            machine_free[i] += instance.time_of(0, s);
        }
    }
    double period = accepted.phase.max_load;

    IdenticalSolution solution;
    solution.level = level;
    solution.schedule.assignment.sets.assign(n, 0);
    solution.schedule.starts.assign(n, 0.0);
    int next_job = 0;
    for (int copy = 0; copy < 20 && next_job < n; ++copy) {
        for (const Slot& slot : slots) {
            if (next_job >= n) break;
            solution.schedule.assignment.sets[next_job] = slot.set;
            solution.schedule.starts[next_job] = copy * period + slot.start;
            ++next_job;
        }
    }
    if (next_job < n)
        throw AuditError("solve_identical: twenty copies did not cover all jobs");
    return solution;
}

}  // namespace malsched
