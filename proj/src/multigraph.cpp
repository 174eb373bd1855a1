#include "malsched/multigraph.hpp"

#include <algorithm>

namespace malsched {

std::vector<int> MultiGraph::degrees() const {
    std::vector<int> deg(num_nodes, 0);
    for (const auto& [u, v] : edges) {
        if (u == v) {
            deg[u] += 1;  // self-loops count once
        } else {
            deg[u] += 1;
            deg[v] += 1;
        }
    }
    return deg;
}

std::vector<int> Orientation::in_degrees(const MultiGraph& g) const {
    std::vector<int> in(g.num_nodes, 0);
    for (size_t e = 0; e < g.edges.size(); ++e) in[heads[e]] += 1;
    return in;
}

Orientation orient_half_indegree(const MultiGraph& g) {
    const int n = g.num_nodes;
    Orientation out;
    out.heads.assign(g.edges.size(), -1);

    // Working edge list without self-loops; ids < 0 mark artificial edges.
    struct WorkEdge {
        int u, v;
        int original;  // -1 for artificial
    };
    std::vector<WorkEdge> work;
    for (size_t e = 0; e < g.edges.size(); ++e) {
        auto [u, v] = g.edges[e];
        if (u == v) {
            out.heads[e] = u;
        } else {
            work.push_back({u, v, static_cast<int>(e)});
        }
    }

    std::vector<int> deg(n, 0);
    for (const auto& w : work) {
        deg[w.u] += 1;
        deg[w.v] += 1;
    }

    // Pair odd-degree nodes (ascending id) with artificial edges so every
    // degree becomes even.
    std::vector<int> odd;
    for (int v = 0; v < n; ++v)
        if (deg[v] % 2 == 1) odd.push_back(v);
    for (size_t k = 0; k + 1 < odd.size(); k += 2) {
        work.push_back({odd[k], odd[k + 1], -1});
        deg[odd[k]] += 1;
        deg[odd[k + 1]] += 1;
    }

    std::vector<std::vector<int>> incidence(n);
    for (size_t w = 0; w < work.size(); ++w) {
        incidence[work[w].u].push_back(static_cast<int>(w));
        incidence[work[w].v].push_back(static_cast<int>(w));
    }

    // Hierholzer per component, starting from the lowest-index node that
    // still has an unused edge. All degrees are even, so each walk closes.
    std::vector<char> used(work.size(), 0);
    std::vector<size_t> cursor(n, 0);
    for (int start = 0; start < n; ++start) {
        if (incidence[start].empty()) continue;
        bool any_unused = false;
        for (int w : incidence[start])
            if (!used[w]) { any_unused = true; break; }
        if (!any_unused) continue;

        std::vector<int> stack_nodes = {start};
        std::vector<int> stack_edges = {-1};
        while (!stack_nodes.empty()) {
            int v = stack_nodes.back();
            bool advanced = false;
            while (cursor[v] < incidence[v].size()) {
                int w = incidence[v][cursor[v]];
                if (used[w]) {
                    ++cursor[v];
                    continue;
                }
                used[w] = 1;
                int next = work[w].u == v ? work[w].v : work[w].u;
                stack_nodes.push_back(next);
                stack_edges.push_back(w);
                advanced = true;
                break;
            }
            if (!advanced) {
                // Retreat; the retreating edge is traversed tail->head in
                // cycle order.
                int w = stack_edges.back();
                stack_nodes.pop_back();
                stack_edges.pop_back();
                if (w >= 0 && work[w].original >= 0) {
                    int head = v;  // we walked into v via edge w
                    out.heads[work[w].original] = head;
                }
            }
        }
    }
    return out;
}

}  // namespace malsched
