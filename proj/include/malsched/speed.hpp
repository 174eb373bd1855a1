#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "json.hpp"

#include "malsched/common.hpp"
#include "malsched/matroid.hpp"

namespace malsched {

// Value oracle for a job's processing speed g : 2^M -> R>=0 with g(empty) = 0.
// Oracles are immutable after construction and safe to share across threads.
class SpeedOracle {
public:
    virtual ~SpeedOracle() = default;
    virtual double eval(MachineSet machines) const = 0;
    virtual nlohmann::ordered_json to_json() const = 0;
};

using SpeedPtr = std::shared_ptr<const SpeedOracle>;

// Table-backed oracle; absent subsets evaluate to 0.
class ExplicitSpeed final : public SpeedOracle {
public:
    explicit ExplicitSpeed(std::map<MachineSet, double> table);
    double eval(MachineSet machines) const override;
    nlohmann::ordered_json to_json() const override;

private:
    std::map<MachineSet, double> table_;
};

// g(S) = |union of per-machine slot sets| / load.
class CoverageSpeed final : public SpeedOracle {
public:
    CoverageSpeed(int slot_count, std::vector<std::uint64_t> slots_per_machine, double load);
    double eval(MachineSet machines) const override;
    nlohmann::ordered_json to_json() const override;
    int slot_count() const { return slot_count_; }

private:
    int slot_count_;
    std::vector<std::uint64_t> slots_;  // one slot bitmask per machine
    double load_;
};

// g(S) = min(sum of weights over S, budget) / load.
class BudgetAdditiveSpeed final : public SpeedOracle {
public:
    BudgetAdditiveSpeed(std::vector<double> weights, double budget, double load);
    double eval(MachineSet machines) const override;
    nlohmann::ordered_json to_json() const override;

private:
    std::vector<double> weights_;
    double budget_;
    double load_;
};

// g(S) = (max weight of a matching between an independent slot set and S) / load.
// Slots carry the weights; independence is a partition matroid on slot groups
// with per-group rank bound. Evaluation runs a max-profit flow.
class MatroidMatchingSpeed final : public SpeedOracle {
public:
    MatroidMatchingSpeed(std::vector<double> slot_weights,
                         std::vector<std::vector<int>> machines_per_slot,
                         std::vector<int> group_of_slot, int rank, double load);
    double eval(MachineSet machines) const override;
    nlohmann::ordered_json to_json() const override;

    int slot_count() const { return static_cast<int>(slot_weights_.size()); }
    int group_count() const { return group_count_; }

private:
    std::vector<double> slot_weights_;
    std::vector<std::vector<int>> edges_;  // per slot: adjacent machine ids
    std::vector<int> group_of_;
    int group_count_;
    int rank_;
    double load_;
};

// g(S) = rank(S) / quota.
class ScaledMatroidRankSpeed final : public SpeedOracle {
public:
    ScaledMatroidRankSpeed(MatroidPtr matroid, double quota);
    double eval(MachineSet machines) const override;
    nlohmann::ordered_json to_json() const override;

    const Matroid& matroid() const { return *matroid_; }
    MatroidPtr matroid_ptr() const { return matroid_; }
    double quota() const { return quota_; }

private:
    MatroidPtr matroid_;
    double quota_;
};

// g(S) = value if S contains all required machines, else 0. Backs the
// clique-style gap instances.
class SupersetThresholdSpeed final : public SpeedOracle {
public:
    SupersetThresholdSpeed(MachineSet required, double value);
    double eval(MachineSet machines) const override;
    nlohmann::ordered_json to_json() const override;
    MachineSet required() const { return required_; }

private:
    MachineSet required_;
    double value_;
};

SpeedPtr speed_from_json(const nlohmann::json& j);

struct PropertyCounterexample {
    MachineSet a = 0;
    MachineSet b = 0;
    int element = -1;  // -1 for pairwise (subadditivity) failures
    double lhs = 0.0;
    double rhs = 0.0;
};

// Diminishing-returns check: g(S+i) - g(S) >= g(T+i) - g(T) for S subset T,
// i outside T. Exhaustive over all triples when m <= 12, sampled otherwise.
// Tolerance 1e-9 absolute.
std::optional<PropertyCounterexample> check_submodular(const SpeedOracle& g, int m,
                                                       int trials, Rng& rng);

// g(S u T) <= g(S) + g(T); exhaustive over all pairs when m <= 12 (values are
// cached first), sampled otherwise.
std::optional<PropertyCounterexample> check_subadditive(const SpeedOracle& g, int m,
                                                        int trials, Rng& rng);

// Pointwise upper approximation of a subadditive g by a fractionally
// subadditive h, evaluated at S: greedy cover rounds pick
// argmin g(A)/|A \ T| over A subset S, assign each newly covered machine
// beta = g(A)/(|A \ T| ln m), and h(S) is the sum of betas. Guarantees
// g(S) >= h(S) >= g(S)/ln(m) for m >= 3. Throws TooLargeError when |S| > 16.
double xos_upper_approx(const SpeedOracle& g, MachineSet s, int m);

// Speed oracle view of the approximation above; used to run subadditive
// instances through the fractionally-subadditive pipeline.
class XosUpperApproxSpeed final : public SpeedOracle {
public:
    XosUpperApproxSpeed(SpeedPtr base, int m) : base_(std::move(base)), m_(m) {}
    double eval(MachineSet machines) const override {
        return machines == 0 ? 0.0 : xos_upper_approx(*base_, machines, m_);
    }
    nlohmann::ordered_json to_json() const override {
        return {{"kind", "xos_surrogate"}, {"base", base_->to_json()}};
    }

private:
    SpeedPtr base_;
    int m_;
};

// min(g, cap) wrapper; a truncation of a submodular oracle stays submodular.
class TruncatedSpeed final : public SpeedOracle {
public:
    TruncatedSpeed(SpeedPtr base, double cap) : base_(std::move(base)), cap_(cap) {}
    double eval(MachineSet machines) const override {
        return std::min(base_->eval(machines), cap_);
    }
    nlohmann::ordered_json to_json() const override {
        return {{"kind", "truncated_speed"}, {"cap", cap_}, {"base", base_->to_json()}};
    }

private:
    SpeedPtr base_;
    double cap_;
};

}  // namespace malsched
