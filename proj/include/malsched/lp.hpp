#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "malsched/common.hpp"

namespace malsched {

// Sparse LP: min/max c'x subject to rows with sense <=, =, >= and per-variable
// bounds (defaults 0 and +inf).
struct LinearProgram {
    enum class Sense { LessEq, Equal, GreaterEq };

    struct Row {
        std::vector<std::pair<int, double>> terms;
        Sense sense = Sense::LessEq;
        double rhs = 0.0;
    };

    bool maximize = false;
    std::vector<double> objective;
    std::vector<double> lower, upper;
    std::vector<Row> rows;

    int num_vars() const { return static_cast<int>(objective.size()); }

    int add_var(double obj = 0.0, double lo = 0.0, double hi = kInf) {
        objective.push_back(obj);
        lower.push_back(lo);
        upper.push_back(hi);
        return num_vars() - 1;
    }

    void add_row(std::vector<std::pair<int, double>> terms, Sense sense, double rhs) {
        rows.push_back({std::move(terms), sense, rhs});
    }
};

// Basic (extreme-point) solution. At optimality at most rows.size() variables
// sit strictly between their bounds. row_duals follow the convention
// objective = sum(dual * rhs) for both senses of optimization.
struct BasicSolution {
    enum class Status { Optimal, Infeasible, Unbounded };

    Status status = Status::Infeasible;
    double objective = 0.0;
    std::vector<double> values;
    std::vector<double> row_duals;
    std::vector<int> basis;  // basic structural variable per tableau row, -1 otherwise
};

// Two-phase dense tableau simplex with Bland's rule; tolerance 1e-9,
// iteration cap 1e6 (NumericFailureError beyond it).
BasicSolution solve_lp(const LinearProgram& lp);

// Bipartite support graph of an assignment-shaped fractional solution:
// one edge per x_ij above threshold.
struct SupportGraph {
    int num_jobs = 0;
    int num_machines = 0;
    // (job, machine, value)
    std::vector<std::tuple<int, int, double>> edges;
};

SupportGraph build_support_graph(const std::vector<std::tuple<int, int, double>>& entries,
                                 int num_jobs, int num_machines, double threshold = 1e-9);

// Every connected component has at most one cycle.
bool is_pseudoforest(const SupportGraph& graph);

// Orients a pseudoforest so every node has in-degree <= 1: tree components
// point away from their lowest-index node, cycles are walked consistently.
// Nodes are jobs 0..J-1 then machines J..J+M-1; returns per-edge head node.
// Throws NotPseudoforestError.
std::vector<int> orient_pseudoforest(const SupportGraph& graph);

// Rounds a fractional solution of the unrelated-machines assignment LP
// (sum_i x_ij = 1 per job, machine loads <= C, x_ij = 0 when p_ij > C) to an
// integral job -> machine map with per-machine load <= 2C. Fractional jobs
// take their lowest-index child machine under the pseudoforest orientation.
std::vector<int> lst_round(const std::vector<std::tuple<int, int, double>>& entries,
                           int num_jobs, int num_machines,
                           const std::vector<std::vector<double>>& processing_time, double C);

// Drives a rho-relaxed decision procedure: proc(C) either returns a solution
// of value <= rho*C or nullopt (certifying no solution below C). Returns the
// smallest accepted level within rel_tol (multiplicative) and the solution of
// the final accepted call. Requires lo <= optimum <= hi.
template <typename Sol>
std::pair<double, Sol> binary_search_decision(
    const std::function<std::optional<Sol>(double)>& proc, double lo, double hi,
    double rel_tol) {
    if (lo > hi * (1 + 1e-12)) throw BoundsInvertedError("binary search: lo > hi");
    std::optional<Sol> best = proc(hi);
    if (!best)
        throw SchedError("decision procedure rejected its upper bound; contract violated");
    if (lo <= 0.0) lo = hi * 0x1.0p-40;
    while (hi > lo * (1 + rel_tol)) {
        double mid = std::sqrt(lo * hi);
        if (auto sol = proc(mid)) {
            best = std::move(sol);
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return {hi, std::move(*best)};
}

}  // namespace malsched
