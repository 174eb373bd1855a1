#include "malsched/transform.hpp"

#include <algorithm>
#include <cmath>

namespace malsched {

namespace {

constexpr double kSupportTol = 1e-9;

void check_committed(const Instance& instance, const Assignment& assignment) {
    for (int j = 0; j < instance.num_jobs; ++j) {
        if (assignment.sets[j] == 0)
            throw ZeroSpeedError("job " + std::to_string(j) + " has an empty set");
        if (!(instance.speed_of(j, assignment.sets[j]) > 0.0))
            throw ZeroSpeedError("job " + std::to_string(j) + " has zero speed on its set");
    }
}

}  // namespace

SpeedShares greedy_speed_shares(const Instance& instance, const Assignment& assignment,
                                const std::vector<int>& machine_order) {
    std::vector<int> order = machine_order;
    if (order.empty()) {
        order.resize(instance.num_machines);
        for (int i = 0; i < instance.num_machines; ++i) order[i] = i;
    }

    SpeedShares shares;
    shares.shares.assign(instance.num_jobs, std::vector<double>(instance.num_machines, 0.0));
    shares.support.assign(instance.num_jobs, 0);
    shares.total.assign(instance.num_jobs, 0.0);

    for (int j = 0; j < instance.num_jobs; ++j) {
        MachineSet sj = assignment.sets[j];
        MachineSet prefix = 0;
        for (int i : order) {
            if (!set_contains(sj, i)) continue;
            double before = instance.speed_of(j, prefix);
            prefix = set_with(prefix, i);
            double after = instance.speed_of(j, prefix);
            double marginal = after - before;
            if (marginal < 0.0) {
                // Non-monotone input; clamp and flag, the sum identity no
                // longer holds.
                marginal = 0.0;
                shares.clamped_negative = true;
            }
            shares.shares[j][i] = marginal;
            shares.total[j] += marginal;
            if (marginal > kSupportTol) shares.support[j] = set_with(shares.support[j], i);
        }
    }
    return shares;
}

SpeedShares cover_lp_speed_shares(const Instance& instance, const Assignment& assignment,
                                  bool tolerate_shortfall) {
    SpeedShares shares;
    shares.shares.assign(instance.num_jobs, std::vector<double>(instance.num_machines, 0.0));
    shares.support.assign(instance.num_jobs, 0);
    shares.total.assign(instance.num_jobs, 0.0);

    for (int j = 0; j < instance.num_jobs; ++j) {
        MachineSet sj = assignment.sets[j];
        if (set_size(sj) > 16)
            throw TooLargeError("cover_lp_speed_shares: assigned set exceeds the subset budget");
        std::vector<int> members = set_to_vector(sj);
        double goal = instance.speed_of(j, sj);

        // Fractional cover LP: min sum alpha_T g(T) with every machine of S_j
        // covered at least once. Its row duals are exactly the shares.
        LinearProgram lp;
        std::vector<MachineSet> columns;
        for_each_submask(sj, [&](MachineSet t) {
            lp.add_var(instance.speed_of(j, t));
            columns.push_back(t);
        });
        for (int idx = 0; idx < static_cast<int>(members.size()); ++idx) {
            std::vector<std::pair<int, double>> terms;
            for (int c = 0; c < static_cast<int>(columns.size()); ++c)
                if (set_contains(columns[c], members[idx])) terms.emplace_back(c, 1.0);
            lp.add_row(std::move(terms), LinearProgram::Sense::GreaterEq, 1.0);
        }
        BasicSolution sol = solve_lp(lp);
        if (sol.status != BasicSolution::Status::Optimal)
            throw NumericFailureError("cover_lp_speed_shares: cover LP did not solve");
        if (!tolerate_shortfall && sol.objective < goal - 1e-7)
            throw ShortBudgetError("cover_lp_speed_shares: shares total " +
                                   std::to_string(sol.objective) + " < g(S) = " +
                                   std::to_string(goal) + "; speed is not XOS");

        for (int idx = 0; idx < static_cast<int>(members.size()); ++idx) {
            double value = std::max(0.0, sol.row_duals[idx]);
            shares.shares[j][members[idx]] = value;
            shares.total[j] += value;
            if (value > kSupportTol)
                shares.support[j] = set_with(shares.support[j], members[idx]);
        }
    }
    return shares;
}

ShareLp build_share_lp(const Instance& instance, const Assignment& assignment,
                       const SpeedShares& shares, double C) {
    (void)assignment;
    ShareLp out;
    std::vector<std::vector<std::pair<int, double>>> machine_terms(instance.num_machines);
    for (int j = 0; j < instance.num_jobs; ++j) {
        std::vector<std::pair<int, double>> job_terms;
        for_each_member(shares.support[j], [&](int i) {
            int v = out.lp.add_var();
            out.var_pairs.emplace_back(j, i);
            job_terms.emplace_back(v, 1.0);
            machine_terms[i].emplace_back(v, 1.0 / shares.shares[j][i]);
        });
        if (job_terms.empty())
            throw OrphanJobError("job " + std::to_string(j) + " has no share support");
        out.lp.add_row(std::move(job_terms), LinearProgram::Sense::GreaterEq, 1.0);
    }
    for (int i = 0; i < instance.num_machines; ++i)
        if (!machine_terms[i].empty())
            out.lp.add_row(std::move(machine_terms[i]), LinearProgram::Sense::LessEq, C);
    return out;
}

ClassifiedAssignment classify_assignments(const Instance& instance, const ShareLp& share_lp,
                                          const BasicSolution& solution,
                                          const SpeedShares& shares) {
    const int n = instance.num_jobs;
    std::vector<std::tuple<int, int, double>> entries;
    for (size_t v = 0; v < share_lp.var_pairs.size(); ++v) {
        auto [j, i] = share_lp.var_pairs[v];
        entries.emplace_back(j, i, solution.values[v]);
    }
    SupportGraph graph = build_support_graph(entries, n, instance.num_machines, kSupportTol);
    std::vector<int> heads = orient_pseudoforest(graph);

    // Per-job LP weight toward the parent machine.
    std::vector<int> parent(n, -1);
    std::vector<MachineSet> children(n, 0);
    std::vector<double> parent_weight(n, 0.0);
    for (size_t e = 0; e < graph.edges.size(); ++e) {
        auto [j, i, x] = graph.edges[e];
        if (heads[e] == j) {
            parent[j] = i;
            parent_weight[j] = x;
        } else {
            children[j] = set_with(children[j], i);
        }
    }

    ClassifiedAssignment out;
    out.parent = parent;
    out.children = children;
    out.is_single.assign(n, 0);
    out.single_lp_load.assign(instance.num_machines, 0.0);
    for (int j = 0; j < n; ++j) {
        if (parent[j] < 0 && children[j] == 0)
            throw OrphanJobError("job " + std::to_string(j) + " is isolated in the support graph");
        if (parent[j] >= 0 && parent_weight[j] > 0.5) {
            out.is_single[j] = 1;
            out.single_lp_load[parent[j]] +=
                parent_weight[j] / shares.shares[j][parent[j]];
        }
    }
    return out;
}

Assignment trim_shared_sets(const Instance& instance, const ClassifiedAssignment& classified,
                            double C) {
    (void)C;
    Assignment out;
    out.sets.assign(instance.num_jobs, 0);
    for (int j = 0; j < instance.num_jobs; ++j) {
        if (classified.is_single[j]) {
            out.sets[j] = singleton(classified.parent[j]);
            continue;
        }
        MachineSet base = classified.children[j];

        // Candidate thresholds: the distinct single-job loads of the child
        // machines (the largest keeps the full set). Pick the candidate
        // minimising twice the kept load plus the job's processing time;
        // ties prefer the smaller objective, then the smaller set.
        std::vector<double> levels;
        for_each_member(base, [&](int i) { levels.push_back(classified.single_lp_load[i]); });
        std::sort(levels.begin(), levels.end());
        levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

        double best_objective = kInf;
        MachineSet best_set = 0;
        for (double level : levels) {
            MachineSet kept = 0;
            double max_load = 0.0;
            for_each_member(base, [&](int i) {
                if (classified.single_lp_load[i] <= level) {
                    kept = set_with(kept, i);
                    max_load = std::max(max_load, classified.single_lp_load[i]);
                }
            });
            double g = instance.speed_of(j, kept);
            if (!(g > 0.0)) continue;
            double objective = 2.0 * max_load + 1.0 / g;
            if (objective < best_objective - 1e-12 ||
                (objective < best_objective + 1e-12 && set_size(kept) < set_size(best_set))) {
                best_objective = objective;
                best_set = kept;
            }
        }
        if (best_set == 0)
            throw EmptyChoiceError("job " + std::to_string(j) +
                                   " has zero speed on every threshold set");
        out.sets[j] = best_set;
    }
    return out;
}

std::pair<Assignment, TransformReport> transform_assignment(const Instance& instance,
                                                            const Assignment& assignment,
                                                            ShareMode mode) {
    check_committed(instance, assignment);
    TransformReport report;
    report.input_load = machine_loads(instance, assignment).max_load;

    SpeedShares shares =
        mode == ShareMode::Greedy
            ? greedy_speed_shares(instance, assignment)
            : cover_lp_speed_shares(instance, assignment,
                                    mode == ShareMode::CoverLpTolerant);
    report.clamped_negative = shares.clamped_negative;

    // Level fed to the share LP: the machine load with each job counted at
    // its share total. Exact share modes reproduce the input load; the
    // tolerant mode can sit above it (never beyond the cover-LP gap).
    double C = report.input_load;
    {
        std::vector<double> share_load(instance.num_machines, 0.0);
        for (int j = 0; j < instance.num_jobs; ++j) {
            if (!(shares.total[j] > 0.0))
                throw OrphanJobError("job " + std::to_string(j) + " has zero share total");
            for_each_member(shares.support[j],
                            [&](int i) { share_load[i] += 1.0 / shares.total[j]; });
        }
        for (double l : share_load) C = std::max(C, l);
    }

    ShareLp share_lp = build_share_lp(instance, assignment, shares, C);
    BasicSolution solution = solve_lp(share_lp.lp);
    if (solution.status != BasicSolution::Status::Optimal)
        throw NumericFailureError("transform_assignment: share LP infeasible");

    ClassifiedAssignment classified =
        classify_assignments(instance, share_lp, solution, shares);
    Assignment trimmed = trim_shared_sets(instance, classified, C);

    // Run audits of the two structural bounds.
    std::vector<double> single_load(instance.num_machines, 0.0);
    for (int j = 0; j < instance.num_jobs; ++j) {
        if (classified.is_single[j]) {
            ++report.single_jobs;
            single_load[classified.parent[j]] += instance.time_of(j, trimmed.sets[j]);
        } else {
            ++report.shared_jobs;
            report.max_shared_time_pretrim = std::max(
                report.max_shared_time_pretrim, instance.time_of(j, classified.children[j]));
        }
    }
    for (double l : single_load) report.max_single_load = std::max(report.max_single_load, l);
    if (report.max_single_load > 2.0 * C * (1 + 1e-9) + 1e-12)
        throw AuditError("transform_assignment: single-machine load exceeds 2C");
    if (report.max_shared_time_pretrim > 2.0 * C * (1 + 1e-9) + 1e-12)
        throw AuditError("transform_assignment: shared job slower than 2C before trimming");

    if (!is_well_structured(trimmed))
        throw AuditError("transform_assignment: output is not well-structured");
    report.output_load = machine_loads(instance, trimmed).max_load;
    report.ratio = report.output_load / report.input_load;
    if (!shares.clamped_negative &&
        report.output_load > transform_ratio_bound() * C + 1e-6)
        throw AuditError("transform_assignment: output load exceeds the proven factor");
    return {std::move(trimmed), report};
}

std::pair<Assignment, TransformReport> transform_subadditive(const Instance& instance,
                                                             const Assignment& assignment) {
    return transform_assignment(instance, assignment, ShareMode::CoverLpTolerant);
}

}  // namespace malsched
