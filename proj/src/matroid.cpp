#include "malsched/matroid.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

#include "malsched/common.hpp"

namespace malsched {

int Matroid::rank(std::span<const int> elems) const {
    std::vector<int> sorted(elems.begin(), elems.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> picked;
    picked.reserve(sorted.size());
    for (int e : sorted) {
        picked.push_back(e);
        if (!is_independent(picked)) picked.pop_back();
    }
    return static_cast<int>(picked.size());
}

int Matroid::full_rank() const {
    std::vector<int> all(ground_size());
    for (int e = 0; e < ground_size(); ++e) all[e] = e;
    return rank(all);
}

namespace {

class PartitionMatroid final : public Matroid {
public:
    PartitionMatroid(std::vector<int> group_of, std::vector<int> capacities)
        : group_of_(std::move(group_of)), cap_(std::move(capacities)) {
        for (int g : group_of_)
            if (g >= static_cast<int>(cap_.size()))
                throw std::invalid_argument("partition_matroid: group id out of range");
        for (int c : cap_)
            if (c < 0) throw std::invalid_argument("partition_matroid: negative capacity");
    }

    int ground_size() const override { return static_cast<int>(group_of_.size()); }

    bool is_independent(std::span<const int> elems) const override {
        std::vector<int> count(cap_.size(), 0);
        for (int e : elems) {
            int g = group_of_[e];
            if (g >= 0 && ++count[g] > cap_[g]) return false;
        }
        return true;
    }

    int rank(std::span<const int> elems) const override {
        std::vector<int> count(cap_.size(), 0);
        int r = 0;
        for (int e : elems) {
            int g = group_of_[e];
            if (g < 0 || ++count[g] <= cap_[g]) ++r;
        }
        return r;
    }

    nlohmann::ordered_json to_json() const override {
        return {{"type", "partition"}, {"group_of", group_of_}, {"capacities", cap_}};
    }

private:
    std::vector<int> group_of_;
    std::vector<int> cap_;
};

class TruncatedMatroid final : public Matroid {
public:
    TruncatedMatroid(MatroidPtr inner, int limit) : inner_(std::move(inner)), limit_(limit) {
        if (limit_ < 0) throw std::invalid_argument("truncate: negative limit");
    }

    int ground_size() const override { return inner_->ground_size(); }

    bool is_independent(std::span<const int> elems) const override {
        return static_cast<int>(elems.size()) <= limit_ && inner_->is_independent(elems);
    }

    int rank(std::span<const int> elems) const override {
        return std::min(limit_, inner_->rank(elems));
    }

    nlohmann::ordered_json to_json() const override {
        return {{"type", "truncated"}, {"limit", limit_}, {"inner", inner_->to_json()}};
    }

private:
    MatroidPtr inner_;
    int limit_;
};

class DirectSumMatroid final : public Matroid {
public:
    explicit DirectSumMatroid(std::vector<MatroidPtr> parts) : parts_(std::move(parts)) {
        offsets_.push_back(0);
        for (const auto& p : parts_) offsets_.push_back(offsets_.back() + p->ground_size());
    }

    int ground_size() const override { return offsets_.back(); }

    bool is_independent(std::span<const int> elems) const override {
        auto split = split_elems(elems);
        for (size_t k = 0; k < parts_.size(); ++k)
            if (!parts_[k]->is_independent(split[k])) return false;
        return true;
    }

    int rank(std::span<const int> elems) const override {
        auto split = split_elems(elems);
        int r = 0;
        for (size_t k = 0; k < parts_.size(); ++k) r += parts_[k]->rank(split[k]);
        return r;
    }

    nlohmann::ordered_json to_json() const override {
        nlohmann::ordered_json parts = nlohmann::ordered_json::array();
        for (const auto& p : parts_) parts.push_back(p->to_json());
        return {{"type", "direct_sum"}, {"parts", parts}};
    }

private:
    std::vector<std::vector<int>> split_elems(std::span<const int> elems) const {
        std::vector<std::vector<int>> split(parts_.size());
        for (int e : elems) {
            size_t k = static_cast<size_t>(
                           std::upper_bound(offsets_.begin(), offsets_.end(), e) -
                           offsets_.begin()) - 1;
            split[k].push_back(e - offsets_[k]);
        }
        return split;
    }

    std::vector<MatroidPtr> parts_;
    std::vector<int> offsets_;
};

}  // namespace

MatroidPtr partition_matroid(std::vector<int> group_of, std::vector<int> capacities) {
    return std::make_shared<PartitionMatroid>(std::move(group_of), std::move(capacities));
}

MatroidPtr free_matroid(int ground_size) {
    return partition_matroid(std::vector<int>(ground_size, -1), {});
}

MatroidPtr uniform_matroid(int ground_size, int limit) {
    return partition_matroid(std::vector<int>(ground_size, 0), {limit});
}

MatroidPtr truncate(MatroidPtr inner, int limit) {
    return std::make_shared<TruncatedMatroid>(std::move(inner), limit);
}

MatroidPtr direct_sum(std::vector<MatroidPtr> parts) {
    return std::make_shared<DirectSumMatroid>(std::move(parts));
}

MatroidPtr matroid_from_json(const nlohmann::json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "partition") {
        return partition_matroid(j.at("group_of").get<std::vector<int>>(),
                                 j.at("capacities").get<std::vector<int>>());
    }
    if (type == "truncated") {
        return truncate(matroid_from_json(j.at("inner")), j.at("limit").get<int>());
    }
    if (type == "direct_sum") {
        std::vector<MatroidPtr> parts;
        for (const auto& p : j.at("parts")) parts.push_back(matroid_from_json(p));
        return direct_sum(std::move(parts));
    }
    throw std::invalid_argument("unknown matroid type: " + type);
}

std::vector<int> matroid_intersection_max(const Matroid& a, const Matroid& b) {
    if (a.ground_size() != b.ground_size())
        throw std::invalid_argument("matroid_intersection_max: ground sets differ");
    const int n = a.ground_size();

    std::vector<char> in_set(n, 0);
    auto current = [&]() {
        std::vector<int> s;
        for (int e = 0; e < n; ++e)
            if (in_set[e]) s.push_back(e);
        return s;
    };
    auto with = [&](int add, int remove) {
        std::vector<int> s;
        for (int e = 0; e < n; ++e)
            if ((in_set[e] && e != remove) || e == add) s.push_back(e);
        return s;
    };

    for (;;) {
        std::vector<char> in_x1(n, 0), in_x2(n, 0);
        for (int y = 0; y < n; ++y) {
            if (in_set[y]) continue;
            if (a.is_independent(with(y, -1))) in_x1[y] = 1;
            if (b.is_independent(with(y, -1))) in_x2[y] = 1;
        }

        // BFS over the exchange graph from X1 toward X2; shortest augmenting
        // path, lowest element index first.
        std::vector<int> parent(n, -2);
        std::deque<int> queue;
        for (int y = 0; y < n; ++y)
            if (in_x1[y]) {
                parent[y] = -1;
                queue.push_back(y);
            }
        int goal = -1;
        while (!queue.empty() && goal < 0) {
            int v = queue.front();
            queue.pop_front();
            if (in_x2[v] && !in_set[v]) {
                goal = v;
                break;
            }
            if (!in_set[v]) {
                // y -> x arcs: S + y - x independent in b.
                for (int x = 0; x < n && goal < 0; ++x) {
                    if (!in_set[x] || parent[x] != -2) continue;
                    if (b.is_independent(with(v, x))) {
                        parent[x] = v;
                        queue.push_back(x);
                    }
                }
            } else {
                // x -> y arcs: S - x + y independent in a.
                for (int y = 0; y < n; ++y) {
                    if (in_set[y] || parent[y] != -2) continue;
                    if (a.is_independent(with(y, v))) {
                        parent[y] = v;
                        queue.push_back(y);
                    }
                }
            }
        }
        if (goal < 0) break;

        for (int v = goal; v != -1; v = parent[v]) in_set[v] = !in_set[v];

        auto s = current();
        if (!a.is_independent(s) || !b.is_independent(s))
            throw OracleInconsistentError(
                "matroid_intersection_max: augmented set is dependent; oracle is not a matroid");
    }
    return current();
}

}  // namespace malsched
