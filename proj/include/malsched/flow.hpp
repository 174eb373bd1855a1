#pragma once

#include <utility>
#include <vector>

namespace malsched {

// Small min-cost flow via successive shortest augmenting paths
// (Bellman-Ford on the residual network). Sized for the oracle-evaluation
// networks in this project, not for large graphs.
class MinCostFlow {
public:
    explicit MinCostFlow(int num_nodes);

    // Returns an edge id usable with flow_on().
    int add_edge(int from, int to, int capacity, double cost);

    // Augments along cheapest paths while they strictly reduce total cost
    // (profit mode), or until max flow when stop_at_nonnegative is false.
    // Returns (flow, cost).
    std::pair<int, double> solve(int source, int sink, bool stop_at_nonnegative);

    int flow_on(int edge_id) const;

private:
    struct Arc {
        int to;
        int cap;
        double cost;
    };
    std::vector<Arc> arcs_;                 // arc 2k is forward, 2k+1 residual
    std::vector<std::vector<int>> adj_;
    int n_;
    std::vector<int> initial_cap_;          // per forward edge
};

// Maximum-cardinality bipartite matching (augmenting paths). `adj[l]` lists
// right-side nodes reachable from left node l. Returns per-left match or -1.
std::vector<int> max_bipartite_matching(const std::vector<std::vector<int>>& adj,
                                        int num_right);

}  // namespace malsched
