#pragma once

// Shared brute-force reference implementations for the test suites. These
// stay independent of the library code paths they check: plain enumeration,
// no pruning beyond an incumbent.

#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include "malsched/baselines.hpp"
#include "malsched/core.hpp"
#include "malsched/matroid.hpp"

namespace testutil {

using namespace malsched;

// Minimum max load over every per-job choice of a positive-speed subset.
inline double exhaustive_min_load(const Instance& instance) {
    MachineSet all = full_set(instance.num_machines);
    std::vector<std::vector<std::pair<MachineSet, double>>> options(instance.num_jobs);
    for (int j = 0; j < instance.num_jobs; ++j) {
        for (MachineSet s = 1; s <= all; ++s) {
            double g = instance.speed_of(j, s);
            if (g > 0.0) options[j].push_back({s, 1.0 / g});
        }
    }
    double best = kInf;
    std::vector<double> loads(instance.num_machines, 0.0);
    auto dfs = [&](auto&& self, int j) -> void {
        if (j == instance.num_jobs) {
            double mx = *std::max_element(loads.begin(), loads.end());
            best = std::min(best, mx);
            return;
        }
        for (const auto& [s, f] : options[j]) {
            for_each_member(s, [&](int i) { loads[i] += f; });
            if (*std::max_element(loads.begin(), loads.end()) < best) self(self, j + 1);
            for_each_member(s, [&](int i) { loads[i] -= f; });
        }
    };
    dfs(dfs, 0);
    return best;
}

// True iff some assignment has max load <= level (small slack for float sums).
inline bool exhaustive_feasible_at(const Instance& instance, double level) {
    return exhaustive_min_load(instance) <= level * (1 + 1e-9);
}

// Minimum makespan over all job sequencing orders for a FIXED assignment,
// packing each job at the earliest time after its conflicting predecessors.
inline double min_makespan_over_orders(const Instance& instance, const Assignment& assignment) {
    int n = instance.num_jobs;
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> times(n);
    for (int j = 0; j < n; ++j) times[j] = instance.time_of(j, assignment.sets[j]);

    double best = kInf;
    do {
        std::vector<double> start(n, 0.0);
        double cmax = 0.0;
        for (int pos = 0; pos < n; ++pos) {
            int j = order[pos];
            double t = 0.0;
            for (int prev = 0; prev < pos; ++prev) {
                int p = order[prev];
                if (assignment.sets[j] & assignment.sets[p])
                    t = std::max(t, start[p] + times[p]);
            }
            start[j] = t;
            cmax = std::max(cmax, t + times[j]);
        }
        best = std::min(best, cmax);
    } while (std::next_permutation(order.begin(), order.end()));
    return best;
}

// Exhaustive welfare optimum: every machine goes to one job or stays idle.
inline double exhaustive_welfare(const std::vector<std::vector<double>>& value_tables, int m) {
    const int n = static_cast<int>(value_tables.size());
    std::vector<MachineSet> sets(n, 0);
    double best = 0.0;
    auto dfs = [&](auto&& self, int i) -> void {
        if (i == m) {
            double total = 0.0;
            for (int j = 0; j < n; ++j) total += value_tables[j][sets[j]];
            best = std::max(best, total);
            return;
        }
        self(self, i + 1);  // machine idle
        for (int j = 0; j < n; ++j) {
            sets[j] = set_with(sets[j], i);
            self(self, i + 1);
            sets[j] = set_without(sets[j], i);
        }
    };
    dfs(dfs, 0);
    return best;
}

// Reference for the matroid-matching oracle: enumerate slot subsets that are
// independent (per-group cap) and all injective slot -> machine maps along
// edges into S.
inline double brute_matching_speed(const std::vector<double>& slot_weights,
                                   const std::vector<std::vector<int>>& edges,
                                   const std::vector<int>& group_of, int rank, double load,
                                   MachineSet s) {
    const int k = static_cast<int>(slot_weights.size());
    int groups = 0;
    for (int g : group_of) groups = std::max(groups, g + 1);

    double best = 0.0;
    std::vector<int> group_used(groups, 0);
    MachineSet used = 0;
    auto dfs = [&](auto&& self, int slot, double weight) -> void {
        best = std::max(best, weight);
        if (slot == k) return;
        self(self, slot + 1, weight);  // slot unmatched
        if (group_used[group_of[slot]] >= rank) return;
        for (int i : edges[slot]) {
            if (!set_contains(s, i) || set_contains(used, i)) continue;
            group_used[group_of[slot]] += 1;
            used = set_with(used, i);
            self(self, slot + 1, weight + slot_weights[slot]);
            used = set_without(used, i);
            group_used[group_of[slot]] -= 1;
        }
    };
    dfs(dfs, 0, 0.0);
    return best / load;
}

// Random monotone subadditive table: monotone seed values, then pairwise
// closure g(A|B) <= g(A) + g(B) to a fixpoint.
inline std::map<MachineSet, double> random_subadditive_table(int m, Rng& rng) {
    MachineSet all = full_set(m);
    std::vector<double> g(all + 1, 0.0);
    for (MachineSet s = 1; s <= all; ++s)
        g[s] = rng.uniform(0.5, 1.5) * std::pow(static_cast<double>(set_size(s)), 0.7);
    for (MachineSet s = 1; s <= all; ++s)
        for (int i = 0; i < m; ++i)
            if (!set_contains(s, i)) g[set_with(s, i)] = std::max(g[set_with(s, i)], g[s]);
    for (int pass = 0; pass < 30; ++pass) {
        bool changed = false;
        for (MachineSet a = 1; a <= all; ++a) {
            for (MachineSet b = a; b <= all; ++b) {
                double sum = g[a] + g[b];
                if (g[a | b] > sum + 1e-15) {
                    g[a | b] = sum;
                    changed = true;
                }
            }
        }
        if (!changed) break;
    }
    std::map<MachineSet, double> table;
    for (MachineSet s = 1; s <= all; ++s) table[s] = g[s];
    return table;
}

// Random instances across the generator families, small enough for the
// exhaustive oracles.
inline Instance random_family_instance(const std::string& family, int n, int m,
                                       std::uint64_t seed) {
    GeneratorConfig config;
    config.family = family;
    config.n = n;
    config.m = m;
    config.seed = seed;
    return generate(config);
}

// Re-seeds until every job can run on the full machine set (sparse coverage
// or matching draws occasionally leave a job with no usable machine at all).
inline Instance viable_family_instance(const std::string& family, int n, int m,
                                       std::uint64_t seed, bool dense_matching = false) {
    for (;; seed += 1000003) {
        GeneratorConfig config;
        config.family = family;
        config.n = n;
        config.m = m;
        config.seed = seed;
        config.matching_dense = dense_matching;
        Instance instance = generate(config);
        bool ok = true;
        for (int j = 0; j < n && ok; ++j)
            ok = instance.speed_of(j, full_set(m)) > 0.0;
        if (ok) return instance;
    }
}

// Random non-empty positive-speed assignment (monotone oracles: the full set
// always works as a fallback).
inline Assignment random_assignment(const Instance& instance, Rng& rng) {
    Assignment assignment;
    MachineSet all = full_set(instance.num_machines);
    for (int j = 0; j < instance.num_jobs; ++j) {
        MachineSet s = 0;
        for (int attempt = 0; attempt < 8; ++attempt) {
            s = rng.next() & all;
            if (s != 0 && instance.speed_of(j, s) > 0.0) break;
            s = 0;
        }
        if (s == 0) s = all;
        assignment.sets.push_back(s);
    }
    return assignment;
}

// Exhaustive matroid axioms on small grounds; also checks rank consistency.
inline bool satisfies_matroid_axioms(const Matroid& matroid) {
    int n = matroid.ground_size();
    if (n > 16) return false;
    std::uint32_t all = (n == 32) ? ~0u : ((1u << n) - 1);
    std::vector<char> indep(all + 1, 0);
    auto as_vec = [&](std::uint32_t mask) {
        std::vector<int> v;
        for (int e = 0; e < n; ++e)
            if ((mask >> e) & 1) v.push_back(e);
        return v;
    };
    for (std::uint32_t s = 0; s <= all; ++s) {
        auto v = as_vec(s);
        indep[s] = matroid.is_independent(v);
    }
    if (!indep[0]) return false;
    for (std::uint32_t s = 0; s <= all; ++s) {
        if (!indep[s]) continue;
        // Hereditary.
        for (int e = 0; e < n; ++e)
            if ((s >> e) & 1 && !indep[s & ~(1u << e)]) return false;
    }
    // Exchange.
    for (std::uint32_t s = 0; s <= all; ++s) {
        if (!indep[s]) continue;
        for (std::uint32_t t = 0; t <= all; ++t) {
            if (!indep[t] || std::popcount(s) >= std::popcount(t)) continue;
            bool found = false;
            for (int e = 0; e < n && !found; ++e)
                if (((t >> e) & 1) && !((s >> e) & 1) && indep[s | (1u << e)]) found = true;
            if (!found) return false;
        }
    }
    // Rank agrees with the maximum independent subset.
    for (std::uint32_t s = 0; s <= all; ++s) {
        int best = 0;
        for (std::uint32_t sub = s;; sub = (sub - 1) & s) {
            if (indep[sub]) best = std::max(best, std::popcount(sub));
            if (sub == 0) break;
        }
        auto v = as_vec(s);
        if (matroid.rank(v) != best) return false;
    }
    return true;
}

}  // namespace testutil
