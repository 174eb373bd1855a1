#include "malsched/speed.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "malsched/flow.hpp"

namespace malsched {

// ---------------------------------------------------------------------------
// ExplicitSpeed

ExplicitSpeed::ExplicitSpeed(std::map<MachineSet, double> table) : table_(std::move(table)) {
    for (const auto& [mask, value] : table_) {
        if (!(value >= 0.0) || !std::isfinite(value))
            throw std::invalid_argument("ExplicitSpeed: values must be finite and >= 0");
        if (mask == 0 && value != 0.0)
            throw std::invalid_argument("ExplicitSpeed: empty set must map to 0");
    }
}

double ExplicitSpeed::eval(MachineSet machines) const {
    auto it = table_.find(machines);
    return it == table_.end() ? 0.0 : it->second;
}

nlohmann::ordered_json ExplicitSpeed::to_json() const {
    nlohmann::ordered_json values = nlohmann::ordered_json::object();
    for (const auto& [mask, value] : table_) values[std::to_string(mask)] = value;
    return {{"kind", "explicit"}, {"values", values}};
}

// ---------------------------------------------------------------------------
// CoverageSpeed

CoverageSpeed::CoverageSpeed(int slot_count, std::vector<std::uint64_t> slots_per_machine,
                             double load)
    : slot_count_(slot_count), slots_(std::move(slots_per_machine)), load_(load) {
    if (slot_count < 0 || slot_count > 64)
        throw std::invalid_argument("CoverageSpeed: slot count must be in [0, 64]");
    if (!(load > 0.0)) throw std::invalid_argument("CoverageSpeed: load must be > 0");
}

double CoverageSpeed::eval(MachineSet machines) const {
    std::uint64_t covered = 0;
    for_each_member(machines, [&](int i) { covered |= slots_[i]; });
    return std::popcount(covered) / load_;
}

nlohmann::ordered_json CoverageSpeed::to_json() const {
    nlohmann::ordered_json per_machine = nlohmann::ordered_json::array();
    for (std::uint64_t mask : slots_) {
        std::vector<int> ids;
        for (int s = 0; s < slot_count_; ++s)
            if ((mask >> s) & 1u) ids.push_back(s);
        per_machine.push_back(ids);
    }
    return {{"kind", "coverage"},
            {"slot_count", slot_count_},
            {"load", load_},
            {"slots_per_machine", per_machine}};
}

// ---------------------------------------------------------------------------
// BudgetAdditiveSpeed

BudgetAdditiveSpeed::BudgetAdditiveSpeed(std::vector<double> weights, double budget, double load)
    : weights_(std::move(weights)), budget_(budget), load_(load) {
    if (!(budget > 0.0)) throw std::invalid_argument("BudgetAdditiveSpeed: budget must be > 0");
    if (!(load > 0.0)) throw std::invalid_argument("BudgetAdditiveSpeed: load must be > 0");
    for (double w : weights_)
        if (!(w >= 0.0)) throw std::invalid_argument("BudgetAdditiveSpeed: negative weight");
}

double BudgetAdditiveSpeed::eval(MachineSet machines) const {
    double total = 0.0;
    for_each_member(machines, [&](int i) { total += weights_[i]; });
    return std::min(total, budget_) / load_;
}

nlohmann::ordered_json BudgetAdditiveSpeed::to_json() const {
    return {{"kind", "budget_additive"},
            {"weights", weights_},
            {"budget", budget_},
            {"load", load_}};
}

// ---------------------------------------------------------------------------
// MatroidMatchingSpeed

MatroidMatchingSpeed::MatroidMatchingSpeed(std::vector<double> slot_weights,
                                           std::vector<std::vector<int>> machines_per_slot,
                                           std::vector<int> group_of_slot, int rank, double load)
    : slot_weights_(std::move(slot_weights)),
      edges_(std::move(machines_per_slot)),
      group_of_(std::move(group_of_slot)),
      rank_(rank),
      load_(load) {
    if (edges_.size() != slot_weights_.size() || group_of_.size() != slot_weights_.size())
        throw std::invalid_argument("MatroidMatchingSpeed: inconsistent slot arrays");
    if (!(load > 0.0)) throw std::invalid_argument("MatroidMatchingSpeed: load must be > 0");
    if (rank_ < 0) throw std::invalid_argument("MatroidMatchingSpeed: negative rank");
    group_count_ = 0;
    for (int gidx : group_of_) group_count_ = std::max(group_count_, gidx + 1);
}

double MatroidMatchingSpeed::eval(MachineSet machines) const {
    const int k = slot_count();
    std::vector<int> machine_ids = set_to_vector(machines);
    if (machine_ids.empty() || k == 0) return 0.0;

    // Layered network: source -> group (cap rank) -> slot (cap 1, profit
    // w_slot on this arc) -> allowed machine (cap 1) -> sink. Profit is
    // maximized by augmenting along cheapest (most negative) paths until no
    // improving path remains; integral caps keep the optimum integral.
    const int source = 0;
    const int group_base = 1;
    const int slot_base = group_base + group_count_;
    const int machine_base = slot_base + k;
    const int sink = machine_base + static_cast<int>(machine_ids.size());
    MinCostFlow net(sink + 1);

    for (int gidx = 0; gidx < group_count_; ++gidx)
        net.add_edge(source, group_base + gidx, rank_, 0.0);
    std::vector<int> machine_pos(kMaxMachines, -1);
    for (size_t p = 0; p < machine_ids.size(); ++p) machine_pos[machine_ids[p]] = static_cast<int>(p);
    bool any_edge = false;
    for (int slot = 0; slot < k; ++slot) {
        net.add_edge(group_base + group_of_[slot], slot_base + slot, 1, -slot_weights_[slot]);
        for (int i : edges_[slot]) {
            if (machine_pos[i] < 0) continue;
            net.add_edge(slot_base + slot, machine_base + machine_pos[i], 1, 0.0);
            any_edge = true;
        }
    }
    if (!any_edge) return 0.0;
    for (size_t p = 0; p < machine_ids.size(); ++p)
        net.add_edge(machine_base + static_cast<int>(p), sink, 1, 0.0);

    auto [flow, cost] = net.solve(source, sink, /*stop_at_nonnegative=*/true);
    (void)flow;
    return -cost / load_;
}

nlohmann::ordered_json MatroidMatchingSpeed::to_json() const {
    return {{"kind", "matroid_matching"},
            {"slot_weights", slot_weights_},
            {"edges", edges_},
            {"group_of", group_of_},
            {"rank", rank_},
            {"load", load_}};
}

// ---------------------------------------------------------------------------
// ScaledMatroidRankSpeed

ScaledMatroidRankSpeed::ScaledMatroidRankSpeed(MatroidPtr matroid, double quota)
    : matroid_(std::move(matroid)), quota_(quota) {
    if (!(quota > 0.0)) throw std::invalid_argument("ScaledMatroidRankSpeed: quota must be > 0");
    if (matroid_->ground_size() > kMaxMachines)
        throw std::invalid_argument("ScaledMatroidRankSpeed: ground too large");
}

double ScaledMatroidRankSpeed::eval(MachineSet machines) const {
    std::vector<int> elems = set_to_vector(machines);
    return matroid_->rank(elems) / quota_;
}

nlohmann::ordered_json ScaledMatroidRankSpeed::to_json() const {
    return {{"kind", "matroid_rank"}, {"quota", quota_}, {"matroid", matroid_->to_json()}};
}

// ---------------------------------------------------------------------------
// SupersetThresholdSpeed

SupersetThresholdSpeed::SupersetThresholdSpeed(MachineSet required, double value)
    : required_(required), value_(value) {
    if (!(value >= 0.0)) throw std::invalid_argument("SupersetThresholdSpeed: negative value");
    if (required == 0)
        throw std::invalid_argument("SupersetThresholdSpeed: required set must be non-empty");
}

double SupersetThresholdSpeed::eval(MachineSet machines) const {
    return (machines & required_) == required_ ? value_ : 0.0;
}

nlohmann::ordered_json SupersetThresholdSpeed::to_json() const {
    return {{"kind", "superset"}, {"required", set_to_vector(required_)}, {"value", value_}};
}

// ---------------------------------------------------------------------------

std::vector<int> set_to_vector(MachineSet s) {
    std::vector<int> ids;
    for_each_member(s, [&](int i) { ids.push_back(i); });
    return ids;
}

MachineSet set_from_vector(const std::vector<int>& ids) {
    MachineSet s = 0;
    for (int i : ids) {
        if (i < 0 || i >= kMaxMachines)
            throw std::invalid_argument("machine id out of range: " + std::to_string(i));
        s = set_with(s, i);
    }
    return s;
}

SpeedPtr speed_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "explicit") {
        std::map<MachineSet, double> table;
        for (const auto& [key, value] : j.at("values").items())
            table[std::stoull(key)] = value.get<double>();
        return std::make_shared<ExplicitSpeed>(std::move(table));
    }
    if (kind == "coverage") {
        int k = j.at("slot_count").get<int>();
        std::vector<std::uint64_t> slots;
        for (const auto& ids : j.at("slots_per_machine")) {
            std::uint64_t mask = 0;
            for (int s : ids.get<std::vector<int>>()) mask |= std::uint64_t{1} << s;
            slots.push_back(mask);
        }
        return std::make_shared<CoverageSpeed>(k, std::move(slots), j.at("load").get<double>());
    }
    if (kind == "budget_additive") {
        return std::make_shared<BudgetAdditiveSpeed>(j.at("weights").get<std::vector<double>>(),
                                                     j.at("budget").get<double>(),
                                                     j.at("load").get<double>());
    }
    if (kind == "matroid_matching") {
        return std::make_shared<MatroidMatchingSpeed>(
            j.at("slot_weights").get<std::vector<double>>(),
            j.at("edges").get<std::vector<std::vector<int>>>(),
            j.at("group_of").get<std::vector<int>>(), j.at("rank").get<int>(),
            j.at("load").get<double>());
    }
    if (kind == "matroid_rank") {
        return std::make_shared<ScaledMatroidRankSpeed>(matroid_from_json(j.at("matroid")),
                                                        j.at("quota").get<double>());
    }
    if (kind == "superset") {
        return std::make_shared<SupersetThresholdSpeed>(
            set_from_vector(j.at("required").get<std::vector<int>>()),
            j.at("value").get<double>());
    }
    throw std::invalid_argument("unknown speed kind: " + kind);
}

// ---------------------------------------------------------------------------
// Property checks

namespace {

constexpr double kPropTol = 1e-9;

std::vector<double> cache_values(const SpeedOracle& g, int m) {
    std::vector<double> table(std::size_t{1} << m);
    for (MachineSet s = 0; s < table.size(); ++s) table[s] = g.eval(s);
    return table;
}

MachineSet random_subset(MachineSet universe, Rng& rng) {
    return rng.next() & universe;
}

}  // namespace

std::optional<PropertyCounterexample> check_submodular(const SpeedOracle& g, int m,
                                                       int trials, Rng& rng) {
    const MachineSet universe = full_set(m);
    if (m <= 12) {
        auto table = cache_values(g, m);
        for (MachineSet t = 0; t <= universe; ++t) {
            for (int i = 0; i < m; ++i) {
                if (set_contains(t, i)) continue;
                double gain_t = table[set_with(t, i)] - table[t];
                // All S subset T, walking submasks of T (S = T included).
                MachineSet s = t;
                for (;;) {
                    double gain_s = table[set_with(s, i)] - table[s];
                    if (gain_s < gain_t - kPropTol)
                        return PropertyCounterexample{s, t, i, gain_s, gain_t};
                    if (s == 0) break;
                    s = (s - 1) & t;
                }
            }
        }
        return std::nullopt;
    }
    for (int trial = 0; trial < trials; ++trial) {
        MachineSet t = random_subset(universe, rng);
        MachineSet s = random_subset(t, rng);
        if (t == universe) continue;
        std::vector<int> outside;
        for (int i = 0; i < m; ++i)
            if (!set_contains(t, i)) outside.push_back(i);
        int i = outside[rng.uniform_int(0, static_cast<int>(outside.size()) - 1)];
        double gain_s = g.eval(set_with(s, i)) - g.eval(s);
        double gain_t = g.eval(set_with(t, i)) - g.eval(t);
        if (gain_s < gain_t - kPropTol) return PropertyCounterexample{s, t, i, gain_s, gain_t};
    }
    return std::nullopt;
}

std::optional<PropertyCounterexample> check_subadditive(const SpeedOracle& g, int m,
                                                        int trials, Rng& rng) {
    const MachineSet universe = full_set(m);
    if (m <= 12) {
        auto table = cache_values(g, m);
        for (MachineSet a = 0; a <= universe; ++a) {
            for (MachineSet b = a; b <= universe; ++b) {
                double lhs = table[a | b];
                double rhs = table[a] + table[b];
                if (lhs > rhs + kPropTol)
                    return PropertyCounterexample{a, b, -1, lhs, rhs};
            }
        }
        return std::nullopt;
    }
    for (int trial = 0; trial < trials; ++trial) {
        MachineSet a = random_subset(universe, rng);
        MachineSet b = random_subset(universe, rng);
        double lhs = g.eval(a | b);
        double rhs = g.eval(a) + g.eval(b);
        if (lhs > rhs + kPropTol) return PropertyCounterexample{a, b, -1, lhs, rhs};
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Subadditive -> fractionally subadditive pointwise approximation

double xos_upper_approx(const SpeedOracle& g, MachineSet s, int m) {
    if (set_size(s) > 16)
        throw TooLargeError("xos_upper_approx: set too large for exhaustive cover search");
    if (s == 0) return 0.0;

    const double log_m = std::log(static_cast<double>(m));
    double total = 0.0;
    MachineSet covered = 0;
    while (covered != s) {
        double best_ratio = kInf;
        MachineSet best = 0;
        int best_new = 0;
        for_each_submask(s, [&](MachineSet a) {
            int fresh = set_size(a & ~covered);
            if (fresh == 0) return;
            double ratio = g.eval(a) / fresh;
            // Ties: smaller subset, then smaller mask.
            if (ratio < best_ratio - 1e-15 ||
                (ratio <= best_ratio + 1e-15 &&
                 (set_size(a) < set_size(best) ||
                  (set_size(a) == set_size(best) && a < best)))) {
                best_ratio = ratio;
                best = a;
                best_new = fresh;
            }
        });
        double beta = g.eval(best) / (best_new * log_m);
        total += beta * best_new;
        covered |= best;
    }
    return total;
}

}  // namespace malsched
