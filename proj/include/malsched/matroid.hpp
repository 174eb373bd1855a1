#pragma once

#include <memory>
#include <span>
#include <vector>

#include "json.hpp"

namespace malsched {

// Independence/rank oracle over ground elements 0..ground_size()-1.
// Rank has a closed form for the concrete constructions below and falls back
// to the oracle greedy otherwise.
class Matroid {
public:
    virtual ~Matroid() = default;
    virtual int ground_size() const = 0;
    virtual bool is_independent(std::span<const int> elems) const = 0;
    virtual int rank(std::span<const int> elems) const;
    virtual nlohmann::ordered_json to_json() const = 0;

    int full_rank() const;
};

using MatroidPtr = std::shared_ptr<const Matroid>;

// group_of[e] is the partition class of element e, or -1 for unconstrained
// elements. capacities[g] bounds the number of picked elements per class.
MatroidPtr partition_matroid(std::vector<int> group_of, std::vector<int> capacities);
MatroidPtr free_matroid(int ground_size);
MatroidPtr uniform_matroid(int ground_size, int limit);
MatroidPtr truncate(MatroidPtr inner, int limit);
// Ground sets are concatenated; element e of part k maps to offset_k + e.
MatroidPtr direct_sum(std::vector<MatroidPtr> parts);

MatroidPtr matroid_from_json(const nlohmann::json& j);

// Maximum-cardinality set independent in both matroids (exchange-graph
// augmentation, shortest paths, lowest-index tie-breaks). Both oracles must
// share the ground size. Throws OracleInconsistentError if an augmentation
// produces a dependent set.
std::vector<int> matroid_intersection_max(const Matroid& a, const Matroid& b);

}  // namespace malsched
