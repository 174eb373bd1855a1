#include "malsched/flow.hpp"

#include <limits>

namespace malsched {

MinCostFlow::MinCostFlow(int num_nodes) : adj_(num_nodes), n_(num_nodes) {}

int MinCostFlow::add_edge(int from, int to, int capacity, double cost) {
    int id = static_cast<int>(arcs_.size());
    arcs_.push_back({to, capacity, cost});
    arcs_.push_back({from, 0, -cost});
    adj_[from].push_back(id);
    adj_[to].push_back(id + 1);
    initial_cap_.push_back(capacity);
    return id / 2;
}

std::pair<int, double> MinCostFlow::solve(int source, int sink, bool stop_at_nonnegative) {
    const double inf = std::numeric_limits<double>::infinity();
    int total_flow = 0;
    double total_cost = 0.0;

    for (;;) {
        // Bellman-Ford; graphs here are tiny and may carry negative costs.
        std::vector<double> dist(n_, inf);
        std::vector<int> pred_arc(n_, -1);
        dist[source] = 0.0;
        for (int round = 0; round < n_; ++round) {
            bool changed = false;
            for (int v = 0; v < n_; ++v) {
                if (dist[v] == inf) continue;
                for (int a : adj_[v]) {
                    const Arc& arc = arcs_[a];
                    if (arc.cap <= 0) continue;
                    double nd = dist[v] + arc.cost;
                    if (nd < dist[arc.to] - 1e-12) {
                        dist[arc.to] = nd;
                        pred_arc[arc.to] = a;
                        changed = true;
                    }
                }
            }
            if (!changed) break;
        }
        if (dist[sink] == inf) break;
        if (stop_at_nonnegative && dist[sink] >= -1e-12) break;

        int bottleneck = std::numeric_limits<int>::max();
        for (int v = sink; v != source;) {
            const Arc& arc = arcs_[pred_arc[v]];
            bottleneck = std::min(bottleneck, arc.cap);
            v = arcs_[pred_arc[v] ^ 1].to;
        }
        for (int v = sink; v != source;) {
            int a = pred_arc[v];
            arcs_[a].cap -= bottleneck;
            arcs_[a ^ 1].cap += bottleneck;
            v = arcs_[a ^ 1].to;
        }
        total_flow += bottleneck;
        total_cost += bottleneck * dist[sink];
    }
    return {total_flow, total_cost};
}

int MinCostFlow::flow_on(int edge_id) const {
    return initial_cap_[edge_id] - arcs_[2 * edge_id].cap;
}

namespace {

bool try_kuhn(int left, const std::vector<std::vector<int>>& adj,
              std::vector<char>& used, std::vector<int>& match_right) {
    for (int r : adj[left]) {
        if (used[r]) continue;
        used[r] = 1;
        if (match_right[r] < 0 || try_kuhn(match_right[r], adj, used, match_right)) {
            match_right[r] = left;
            return true;
        }
    }
    return false;
}

}  // namespace

std::vector<int> max_bipartite_matching(const std::vector<std::vector<int>>& adj,
                                        int num_right) {
    int num_left = static_cast<int>(adj.size());
    std::vector<int> match_right(num_right, -1);
    for (int l = 0; l < num_left; ++l) {
        std::vector<char> used(num_right, 0);
        try_kuhn(l, adj, used, match_right);
    }
    std::vector<int> match_left(num_left, -1);
    for (int r = 0; r < num_right; ++r)
        if (match_right[r] >= 0) match_left[match_right[r]] = r;
    return match_left;
}

}  // namespace malsched
