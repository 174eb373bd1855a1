#include "malsched/lp.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace malsched {

namespace {

constexpr double kTol = 1e-9;
constexpr long kMaxPivots = 1'000'000;

// Dense two-phase tableau. Columns: structural vars, then slack/surplus per
// row, then artificials, then rhs.
class SimplexTableau {
public:
    SimplexTableau(const LinearProgram& lp) {
        const int n = lp.num_vars();
        minimize_.assign(n, 0.0);
        shift_ = lp.lower;
        for (int v = 0; v < n; ++v) {
            if (!std::isfinite(shift_[v]))
                throw std::invalid_argument("solve_lp: lower bounds must be finite");
            minimize_[v] = lp.maximize ? -lp.objective[v] : lp.objective[v];
        }

        struct NormRow {
            std::vector<std::pair<int, double>> terms;
            LinearProgram::Sense sense;
            double rhs;
            int original;  // index into lp.rows, -1 for bound rows
            double flip = 1.0;
        };
        std::vector<NormRow> norm;
        for (size_t r = 0; r < lp.rows.size(); ++r) {
            const auto& row = lp.rows[r];
            double rhs = row.rhs;
            for (const auto& [v, a] : row.terms) rhs -= a * shift_[v];
            norm.push_back({row.terms, row.sense, rhs, static_cast<int>(r), 1.0});
        }
        for (int v = 0; v < n; ++v) {
            if (!std::isfinite(lp.upper[v])) continue;
            double span = lp.upper[v] - shift_[v];
            if (span < -kTol) throw std::invalid_argument("solve_lp: upper < lower");
            norm.push_back({{{v, 1.0}}, LinearProgram::Sense::LessEq, span, -1, 1.0});
        }
        for (auto& row : norm) {
            if (row.rhs < 0.0) {
                for (auto& [v, a] : row.terms) a = -a;
                row.rhs = -row.rhs;
                row.flip = -1.0;
                if (row.sense == LinearProgram::Sense::LessEq)
                    row.sense = LinearProgram::Sense::GreaterEq;
                else if (row.sense == LinearProgram::Sense::GreaterEq)
                    row.sense = LinearProgram::Sense::LessEq;
            }
        }

        rows_ = static_cast<int>(norm.size());
        num_structural_ = n;
        int num_slack = 0, num_art = 0;
        for (const auto& row : norm) {
            if (row.sense != LinearProgram::Sense::Equal) ++num_slack;
            if (row.sense != LinearProgram::Sense::LessEq) ++num_art;
        }
        cols_ = n + num_slack + num_art;
        art_begin_ = n + num_slack;
        tab_.assign(rows_, std::vector<double>(cols_ + 1, 0.0));
        basis_.assign(rows_, -1);
        row_ref_.assign(lp.rows.size(), -1);
        ref_col_.assign(rows_, -1);
        ref_sign_.assign(rows_, 1.0);
        flip_.assign(rows_, 1.0);

        int slack = n, art = art_begin_;
        for (int r = 0; r < rows_; ++r) {
            const auto& row = norm[r];
            for (const auto& [v, a] : row.terms) tab_[r][v] += a;
            tab_[r][cols_] = row.rhs;
            flip_[r] = row.flip;
            if (row.original >= 0) row_ref_[row.original] = r;
            switch (row.sense) {
                case LinearProgram::Sense::LessEq:
                    tab_[r][slack] = 1.0;
                    basis_[r] = slack;
                    ref_col_[r] = slack;
                    ref_sign_[r] = -1.0;  // y = -d_slack
                    ++slack;
                    break;
                case LinearProgram::Sense::GreaterEq:
                    tab_[r][slack] = -1.0;
                    ref_col_[r] = slack;
                    ref_sign_[r] = 1.0;  // y = +d_surplus
                    ++slack;
                    tab_[r][art] = 1.0;
                    basis_[r] = art;
                    ++art;
                    break;
                case LinearProgram::Sense::Equal:
                    tab_[r][art] = 1.0;
                    basis_[r] = art;
                    ref_col_[r] = art;
                    ref_sign_[r] = -1.0;  // y = -d_artificial
                    ++art;
                    break;
            }
        }
    }

    BasicSolution solve(const LinearProgram& lp) {
        BasicSolution out;

        // Phase 1: minimize the artificial sum.
        std::vector<double> cost(cols_ + 1, 0.0);
        for (int c = art_begin_; c < cols_; ++c) cost[c] = 1.0;
        price_out(cost);
        run(cost, /*allow_artificial=*/true);
        if (cost[cols_] < -1e-7) {
            out.status = BasicSolution::Status::Infeasible;
            return out;
        }
        drive_out_artificials(cost);

        // Phase 2.
        std::fill(cost.begin(), cost.end(), 0.0);
        for (int v = 0; v < num_structural_; ++v) cost[v] = minimize_[v];
        price_out(cost);
        bool bounded = run(cost, /*allow_artificial=*/false);
        if (!bounded) {
            out.status = BasicSolution::Status::Unbounded;
            return out;
        }

        out.status = BasicSolution::Status::Optimal;
        out.values.assign(num_structural_, 0.0);
        out.basis.assign(rows_, -1);
        for (int r = 0; r < rows_; ++r) {
            if (basis_[r] < num_structural_) {
                out.values[basis_[r]] = tab_[r][cols_];
                out.basis[r] = basis_[r];
            }
        }
        double objective = 0.0;
        for (int v = 0; v < num_structural_; ++v) {
            out.values[v] += shift_[v];
            objective += lp.objective[v] * out.values[v];
        }
        out.objective = objective;

        // Duals from reduced costs of each row's reference column. cost[] now
        // holds d_j = c_j - y'A_j for the internal minimization.
        out.row_duals.assign(lp.rows.size(), 0.0);
        double sense = lp.maximize ? -1.0 : 1.0;
        for (size_t r = 0; r < lp.rows.size(); ++r) {
            int tr = row_ref_[r];
            if (tr < 0) continue;
            double y = ref_sign_[tr] * cost[ref_col_[tr]];
            out.row_duals[r] = sense * flip_[tr] * y;
        }
        return out;
    }

private:
    void price_out(std::vector<double>& cost) {
        // cost holds raw costs; subtract basic rows so reduced costs of basic
        // columns are zero. cost[cols_] accumulates -objective.
        cost[cols_] = 0.0;
        for (int r = 0; r < rows_; ++r) {
            double cb = cost[basis_[r]];
            if (cb == 0.0) continue;
            for (int c = 0; c <= cols_; ++c) cost[c] -= cb * tab_[r][c];
        }
        cost[cols_] = -cost[cols_];
        // Note: we keep cost[cols_] as the negated objective value below.
        cost[cols_] = -cost[cols_];
    }

    // Bland's rule pivots until optimal (returns true) or unbounded (false).
    bool run(std::vector<double>& cost, bool allow_artificial) {
        for (;;) {
            if (++pivots_ > kMaxPivots)
                throw NumericFailureError("simplex: iteration cap exceeded");
            int enter = -1;
            int limit = allow_artificial ? cols_ : art_begin_;
            for (int c = 0; c < limit; ++c) {
                if (cost[c] < -kTol) {
                    enter = c;
                    break;
                }
            }
            if (enter < 0) return true;

            int leave = -1;
            double best_ratio = 0.0;
            for (int r = 0; r < rows_; ++r) {
                double a = tab_[r][enter];
                if (a > kTol) {
                    double ratio = tab_[r][cols_] / a;
                    if (leave < 0 || ratio < best_ratio - kTol ||
                        (ratio < best_ratio + kTol && basis_[r] < basis_[leave])) {
                        leave = r;
                        best_ratio = ratio;
                    }
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter, cost);
        }
    }

    void pivot(int r, int c, std::vector<double>& cost) {
        double inv = 1.0 / tab_[r][c];
        for (int j = 0; j <= cols_; ++j) tab_[r][j] *= inv;
        tab_[r][c] = 1.0;
        for (int i = 0; i < rows_; ++i) {
            if (i == r) continue;
            double factor = tab_[i][c];
            if (factor == 0.0) continue;
            for (int j = 0; j <= cols_; ++j) tab_[i][j] -= factor * tab_[r][j];
            tab_[i][c] = 0.0;
        }
        double cf = cost[c];
        if (cf != 0.0) {
            for (int j = 0; j <= cols_; ++j) cost[j] -= cf * tab_[r][j];
            cost[c] = 0.0;
        }
        basis_[r] = c;
    }

    // Pivots zero-valued basic artificials onto structural/slack columns so
    // phase 2 cannot disturb feasibility; all-zero rows are redundant and
    // stay inert.
    void drive_out_artificials(std::vector<double>& cost) {
        for (int r = 0; r < rows_; ++r) {
            if (basis_[r] < art_begin_) continue;
            int target = -1;
            for (int c = 0; c < art_begin_; ++c) {
                if (std::abs(tab_[r][c]) > kTol) {
                    target = c;
                    break;
                }
            }
            if (target >= 0) pivot(r, target, cost);
        }
    }

    std::vector<std::vector<double>> tab_;
    std::vector<int> basis_;
    std::vector<double> minimize_, shift_;
    std::vector<int> row_ref_, ref_col_;
    std::vector<double> ref_sign_, flip_;
    int rows_ = 0, cols_ = 0, num_structural_ = 0, art_begin_ = 0;
    long pivots_ = 0;
};

}  // namespace

BasicSolution solve_lp(const LinearProgram& lp) {
    SimplexTableau tableau(lp);
    return tableau.solve(lp);
}

// ---------------------------------------------------------------------------
// Support graphs

SupportGraph build_support_graph(const std::vector<std::tuple<int, int, double>>& entries,
                                 int num_jobs, int num_machines, double threshold) {
    SupportGraph graph;
    graph.num_jobs = num_jobs;
    graph.num_machines = num_machines;
    for (const auto& [j, i, x] : entries)
        if (x > threshold) graph.edges.emplace_back(j, i, x);
    return graph;
}

namespace {

struct ComponentView {
    std::vector<std::vector<std::pair<int, int>>> adj;  // node -> (neighbor, edge id)
    int num_nodes;

    explicit ComponentView(const SupportGraph& graph) {
        num_nodes = graph.num_jobs + graph.num_machines;
        adj.resize(num_nodes);
        for (size_t e = 0; e < graph.edges.size(); ++e) {
            auto [j, i, x] = graph.edges[e];
            int u = j, v = graph.num_jobs + i;
            adj[u].emplace_back(v, static_cast<int>(e));
            adj[v].emplace_back(u, static_cast<int>(e));
        }
    }
};

}  // namespace

bool is_pseudoforest(const SupportGraph& graph) {
    ComponentView view(graph);
    std::vector<char> seen(view.num_nodes, 0);
    for (int start = 0; start < view.num_nodes; ++start) {
        if (seen[start]) continue;
        int nodes = 0, edge_endpoints = 0;
        std::deque<int> queue = {start};
        seen[start] = 1;
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            ++nodes;
            edge_endpoints += static_cast<int>(view.adj[v].size());
            for (auto [w, e] : view.adj[v]) {
                if (!seen[w]) {
                    seen[w] = 1;
                    queue.push_back(w);
                }
            }
        }
        if (edge_endpoints / 2 > nodes) return false;
    }
    return true;
}

std::vector<int> orient_pseudoforest(const SupportGraph& graph) {
    ComponentView view(graph);
    std::vector<int> heads(graph.edges.size(), -1);
    std::vector<char> seen(view.num_nodes, 0);

    for (int start = 0; start < view.num_nodes; ++start) {
        if (seen[start] || view.adj[start].empty()) continue;

        // Collect the component.
        std::vector<int> nodes;
        std::deque<int> queue = {start};
        seen[start] = 1;
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            nodes.push_back(v);
            for (auto [w, e] : view.adj[v])
                if (!seen[w]) {
                    seen[w] = 1;
                    queue.push_back(w);
                }
        }
        int edge_count = 0;
        for (int v : nodes) edge_count += static_cast<int>(view.adj[v].size());
        edge_count /= 2;
        int node_count = static_cast<int>(nodes.size());
        if (edge_count > node_count)
            throw NotPseudoforestError("support component has more than one cycle");

        std::vector<int> roots;
        if (edge_count == node_count) {
            // Peel degree-1 nodes; the leftover 2-regular core is the cycle.
            std::vector<int> degree(view.num_nodes, 0);
            std::vector<char> removed(view.num_nodes, 0);
            for (int v : nodes) degree[v] = static_cast<int>(view.adj[v].size());
            std::deque<int> leaves;
            for (int v : nodes)
                if (degree[v] == 1) leaves.push_back(v);
            while (!leaves.empty()) {
                int v = leaves.front();
                leaves.pop_front();
                removed[v] = 1;
                for (auto [w, e] : view.adj[v])
                    if (!removed[w] && --degree[w] == 1) leaves.push_back(w);
            }
            // Walk the cycle consistently from its lowest node.
            int cycle_start = -1;
            for (int v : nodes)
                if (!removed[v]) {
                    cycle_start = v;
                    break;
                }
            std::vector<char> edge_used(graph.edges.size(), 0);
            int current = cycle_start;
            for (;;) {
                int next = -1, via = -1;
                for (auto [w, e] : view.adj[current]) {
                    if (removed[w] || edge_used[e]) continue;
                    next = w;
                    via = e;
                    break;
                }
                if (next < 0) break;
                edge_used[via] = 1;
                heads[via] = next;
                current = next;
            }
            for (int v : nodes)
                if (!removed[v]) roots.push_back(v);
        } else {
            roots.push_back(*std::min_element(nodes.begin(), nodes.end()));
        }

        // Orient the remaining (tree) edges away from the roots.
        std::vector<char> visited(view.num_nodes, 0);
        std::deque<int> bfs(roots.begin(), roots.end());
        for (int r : roots) visited[r] = 1;
        while (!bfs.empty()) {
            int v = bfs.front();
            bfs.pop_front();
            for (auto [w, e] : view.adj[v]) {
                if (heads[e] >= 0 || visited[w]) continue;
                heads[e] = w;
                visited[w] = 1;
                bfs.push_back(w);
            }
        }
    }
    return heads;
}

std::vector<int> lst_round(const std::vector<std::tuple<int, int, double>>& entries,
                           int num_jobs, int num_machines,
                           const std::vector<std::vector<double>>& processing_time, double C) {
    std::vector<int> assigned(num_jobs, -1);
    std::vector<std::tuple<int, int, double>> fractional;
    for (const auto& [j, i, x] : entries) {
        if (x <= 1e-9) continue;
        if (processing_time[i][j] > C * (1 + 1e-9))
            throw SchedError("lst_round: support on a pair with processing time above C");
        if (x >= 1.0 - 1e-7)
            assigned[j] = i;
        else
            fractional.emplace_back(j, i, x);
    }

    std::vector<std::tuple<int, int, double>> open;
    for (const auto& [j, i, x] : fractional)
        if (assigned[j] < 0) open.emplace_back(j, i, x);

    SupportGraph graph = build_support_graph(open, num_jobs, num_machines);
    std::vector<int> heads = orient_pseudoforest(graph);
    for (size_t e = 0; e < graph.edges.size(); ++e) {
        auto [j, i, x] = graph.edges[e];
        if (heads[e] != num_jobs + i) continue;  // not a child machine of j
        if (assigned[j] < 0 || i < assigned[j]) assigned[j] = i;
    }
    for (const auto& [j, i, x] : open)
        if (assigned[j] < 0)
            throw AuditError("lst_round: fractional job without a child machine");
    return assigned;
}

}  // namespace malsched
