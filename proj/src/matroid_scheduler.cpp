#include "malsched/matroid_scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "malsched/lp.hpp"
#include "malsched/multigraph.hpp"

namespace malsched {

std::vector<MatroidJob> matroid_view(const Instance& instance) {
    std::vector<MatroidJob> jobs;
    jobs.reserve(instance.num_jobs);
    for (const auto& oracle : instance.speed) {
        auto rank_speed = std::dynamic_pointer_cast<const ScaledMatroidRankSpeed>(oracle);
        if (!rank_speed)
            throw NonMatroidInstanceError(
                "matroid scheduler requires scaled-matroid-rank speeds for every job");
        jobs.push_back({rank_speed->matroid_ptr(), rank_speed->quota()});
    }
    return jobs;
}

JobSplit split_jobs(const Instance& instance, double C) {
    if (!(C > 0.0)) throw std::invalid_argument("split_jobs: level must be positive");
    auto jobs = matroid_view(instance);
    JobSplit split;
    split.machines_needed.resize(instance.num_jobs);
    for (int j = 0; j < instance.num_jobs; ++j) {
        // Relative guard keeps exact multiples at their floor.
        double ratio = jobs[j].quota / C;
        int t = static_cast<int>(std::ceil(ratio - 1e-12 * std::max(1.0, ratio)));
        t = std::max(t, 1);
        split.machines_needed[j] = t;
        (t == 1 ? split.single_jobs : split.multi_jobs).push_back(j);
    }
    return split;
}

std::variant<SingleAssignment, Certificate> step1_single_machine(const Instance& instance,
                                                                 const JobSplit& split,
                                                                 double C) {
    auto jobs = matroid_view(instance);
    SingleAssignment result;
    result.machine_of.assign(instance.num_jobs, -1);
    if (split.single_jobs.empty()) return result;

    // Assignment LP over pairs with an independent singleton (processing
    // time quota_j <= C holds for every single-machine job).
    LinearProgram lp;
    std::vector<std::pair<int, int>> vars;  // (job, machine)
    std::vector<std::vector<std::pair<int, double>>> machine_terms(instance.num_machines);
    for (int j : split.single_jobs) {
        std::vector<std::pair<int, double>> job_terms;
        for (int i = 0; i < instance.num_machines; ++i) {
            int elem[1] = {i};
            if (!jobs[j].matroid->is_independent(std::span<const int>(elem, 1))) continue;
            int v = lp.add_var();
            vars.emplace_back(j, i);
            job_terms.emplace_back(v, 1.0);
            machine_terms[i].emplace_back(v, jobs[j].quota);
        }
        if (job_terms.empty())
            return Certificate{C, "job " + std::to_string(j) +
                                      " fits no single machine at this level"};
        lp.add_row(std::move(job_terms), LinearProgram::Sense::Equal, 1.0);
    }
    for (int i = 0; i < instance.num_machines; ++i)
        if (!machine_terms[i].empty())
            lp.add_row(std::move(machine_terms[i]), LinearProgram::Sense::LessEq, C);

    BasicSolution sol = solve_lp(lp);
    if (sol.status != BasicSolution::Status::Optimal)
        return Certificate{C, "single-machine assignment LP is infeasible"};

    // Compact job ids for the rounding step.
    std::vector<int> dense_of(instance.num_jobs, -1);
    for (size_t d = 0; d < split.single_jobs.size(); ++d) dense_of[split.single_jobs[d]] = static_cast<int>(d);
    std::vector<std::tuple<int, int, double>> entries;
    for (size_t v = 0; v < vars.size(); ++v)
        entries.emplace_back(dense_of[vars[v].first], vars[v].second, sol.values[v]);
    std::vector<std::vector<double>> processing(instance.num_machines,
                                                std::vector<double>(split.single_jobs.size(), kInf));
    for (const auto& [j, i] : vars) processing[i][dense_of[j]] = jobs[j].quota;

    std::vector<int> rounded = lst_round(entries, static_cast<int>(split.single_jobs.size()),
                                         instance.num_machines, processing, C);
    for (size_t d = 0; d < split.single_jobs.size(); ++d)
        result.machine_of[split.single_jobs[d]] = rounded[d];
    return result;
}

std::variant<IntersectionResult, Certificate> step2_intersection(const Instance& instance,
                                                                 const JobSplit& split,
                                                                 double C) {
    auto jobs = matroid_view(instance);
    IntersectionResult result;
    result.sets.assign(instance.num_jobs, 0);
    if (split.multi_jobs.empty()) return result;

    const int m = instance.num_machines;
    const int blocks = static_cast<int>(split.multi_jobs.size());

    // Ground element (block, machine) -> block * m + machine.
    std::vector<MatroidPtr> parts;
    int needed_total = 0;
    for (int b = 0; b < blocks; ++b) {
        int j = split.multi_jobs[b];
        parts.push_back(truncate(jobs[j].matroid, split.machines_needed[j]));
        needed_total += split.machines_needed[j];
    }
    MatroidPtr per_job = direct_sum(std::move(parts));

    std::vector<int> machine_group(blocks * m);
    for (int b = 0; b < blocks; ++b)
        for (int i = 0; i < m; ++i) machine_group[b * m + i] = i;
    MatroidPtr two_copies = partition_matroid(std::move(machine_group), std::vector<int>(m, 2));

    std::vector<int> best = matroid_intersection_max(*per_job, *two_copies);
    if (static_cast<int>(best.size()) < needed_total)
        return Certificate{C, "matroid intersection covers only " +
                                  std::to_string(best.size()) + " of " +
                                  std::to_string(needed_total) + " machine slots"};

    for (int e : best) {
        int b = e / m, i = e % m;
        int j = split.multi_jobs[b];
        result.picked.emplace_back(i, j);
        result.sets[j] = set_with(result.sets[j], i);
    }
    return result;
}

Assignment step3a_merge(const Instance& instance, const JobSplit& split,
                        const SingleAssignment& singles, const IntersectionResult& inter) {
    Assignment out;
    out.sets.assign(instance.num_jobs, 0);
    for (int j : split.single_jobs) out.sets[j] = singleton(singles.machine_of[j]);
    for (int j : split.multi_jobs) out.sets[j] = inter.sets[j];
    return out;
}

WellStructuredResult step3b_schedule(const Instance& instance, const JobSplit& split,
                                     const SingleAssignment& singles,
                                     const IntersectionResult& inter) {
    // Each machine picked at most twice; its picks form an edge between the
    // two jobs (or a self-loop). Orienting the multigraph with half in-degree
    // lets every job keep >= floor(t_j/2) machines, one shared job per
    // machine.
    std::vector<int> node_of(instance.num_jobs, -1);
    for (size_t b = 0; b < split.multi_jobs.size(); ++b) node_of[split.multi_jobs[b]] = static_cast<int>(b);

    MultiGraph graph;
    graph.num_nodes = static_cast<int>(split.multi_jobs.size());
    std::vector<int> edge_machine;
    std::vector<std::vector<int>> picks_of_machine(instance.num_machines);
    for (const auto& [i, j] : inter.picked) picks_of_machine[i].push_back(j);
    for (int i = 0; i < instance.num_machines; ++i) {
        const auto& picks = picks_of_machine[i];
        if (picks.empty()) continue;
        int u = node_of[picks[0]];
        int v = picks.size() > 1 ? node_of[picks[1]] : u;
        graph.add_edge(u, v);
        edge_machine.push_back(i);
    }

    Orientation orientation = orient_half_indegree(graph);

    Assignment out;
    out.sets.assign(instance.num_jobs, 0);
    for (int j : split.single_jobs) out.sets[j] = singleton(singles.machine_of[j]);
    for (size_t e = 0; e < graph.edges.size(); ++e) {
        int j = split.multi_jobs[orientation.heads[e]];
        out.sets[j] = set_with(out.sets[j], edge_machine[e]);
    }
    for (int j : split.multi_jobs) {
        int kept = set_size(out.sets[j]);
        int needed = split.machines_needed[j];
        if (kept < needed / 2 || kept < 1)
            throw AuditError("step3b: job kept fewer machines than the orientation guarantees");
    }
    if (!is_well_structured(out))
        throw AuditError("step3b: merged assignment is not well-structured");

    WellStructuredResult result;
    result.schedule = schedule_from_well_structured(instance, out);
    result.assignment = std::move(out);
    return result;
}

std::optional<MatroidDecision> matroid_decision(const Instance& instance, double C) {
    JobSplit split = split_jobs(instance, C);
    auto step1 = step1_single_machine(instance, split, C);
    if (std::holds_alternative<Certificate>(step1)) return std::nullopt;
    auto step2 = step2_intersection(instance, split, C);
    if (std::holds_alternative<Certificate>(step2)) return std::nullopt;

    const auto& singles = std::get<SingleAssignment>(step1);
    const auto& inter = std::get<IntersectionResult>(step2);

    MatroidDecision decision;
    decision.assignment = step3a_merge(instance, split, singles, inter);
    if (machine_loads(instance, decision.assignment).max_load > 4.0 * C * (1 + 1e-9))
        throw AuditError("matroid_decision: merged load exceeds 4C");
    WellStructuredResult ws = step3b_schedule(instance, split, singles, inter);
    if (makespan(instance, ws.schedule) > 5.0 * C * (1 + 1e-9))
        throw AuditError("matroid_decision: schedule makespan exceeds 5C");
    decision.schedule = std::move(ws.schedule);
    return decision;
}

MatroidSolution solve_matroid(const Instance& instance, double rel_tol) {
    auto jobs = matroid_view(instance);

    double lo = 0.0, hi = 0.0;
    for (int j = 0; j < instance.num_jobs; ++j) {
        int rank = jobs[j].matroid->full_rank();
        if (rank < 1)
            throw ZeroSpeedError("job " + std::to_string(j) + " has a rank-0 matroid");
        lo = std::max(lo, jobs[j].quota / rank);
        // One machine if some singleton is independent, a full basis
        // otherwise; processing the jobs one after another realises this sum.
        bool has_singleton = false;
        for (int i = 0; i < instance.num_machines && !has_singleton; ++i) {
            int elem[1] = {i};
            has_singleton = jobs[j].matroid->is_independent(std::span<const int>(elem, 1));
        }
        hi += has_singleton ? jobs[j].quota : jobs[j].quota / rank;
    }
    hi = std::max(hi, lo);

    std::function<std::optional<MatroidDecision>(double)> proc =
        [&](double C) { return matroid_decision(instance, C); };
    auto [level, decision] = binary_search_decision<MatroidDecision>(proc, lo, hi, rel_tol);

    MatroidSolution solution;
    solution.assignment = std::move(decision.assignment);
    solution.schedule = std::move(decision.schedule);
    solution.level = level;
    return solution;
}

}  // namespace malsched
