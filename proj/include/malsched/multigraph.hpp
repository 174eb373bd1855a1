#pragma once

#include <utility>
#include <vector>

namespace malsched {

// Undirected multigraph; self-loops and parallel edges allowed. A self-loop
// contributes 1 to its node's degree (the convention the schedulers rely on).
struct MultiGraph {
    int num_nodes = 0;
    std::vector<std::pair<int, int>> edges;

    void add_edge(int u, int v) { edges.emplace_back(u, v); }
    std::vector<int> degrees() const;
};

// Per-edge head node; heads[e] is the node edge e points into.
struct Orientation {
    std::vector<int> heads;

    std::vector<int> in_degrees(const MultiGraph& g) const;
};

// Orients every edge so that each node v receives in-degree >= floor(d(v)/2).
// Odd-degree nodes are paired with temporary edges, every component is walked
// as an Euler cycle, and the cycle direction is kept; self-loops point into
// their node.
Orientation orient_half_indegree(const MultiGraph& g);

}  // namespace malsched
