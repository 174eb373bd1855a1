#pragma once

#include <bit>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace malsched {

// A set of machines, one bit per machine id. Instance construction enforces
// m <= 64.
using MachineSet = std::uint64_t;

constexpr int kMaxMachines = 64;
constexpr double kInf = std::numeric_limits<double>::infinity();

inline int set_size(MachineSet s) { return std::popcount(s); }
inline bool set_contains(MachineSet s, int i) { return (s >> i) & 1u; }
inline MachineSet set_with(MachineSet s, int i) { return s | (MachineSet{1} << i); }
inline MachineSet set_without(MachineSet s, int i) { return s & ~(MachineSet{1} << i); }
inline MachineSet singleton(int i) { return MachineSet{1} << i; }

inline MachineSet full_set(int m) {
    return m >= kMaxMachines ? ~MachineSet{0} : (MachineSet{1} << m) - 1;
}

std::vector<int> set_to_vector(MachineSet s);
MachineSet set_from_vector(const std::vector<int>& ids);

// Visits every member of `s` in ascending id order.
template <typename F>
void for_each_member(MachineSet s, F&& f) {
    while (s) {
        int i = std::countr_zero(s);
        f(i);
        s &= s - 1;
    }
}

// Visits every non-empty submask of `s` (ascending numeric order not guaranteed;
// classic descending submask walk, deterministic).
template <typename F>
void for_each_submask(MachineSet s, F&& f) {
    for (MachineSet t = s; t; t = (t - 1) & s) f(t);
}

// Deterministic RNG used everywhere. The raw engine is mt19937_64; the
// mapping helpers below are spelled out so generated instances do not depend
// on the standard library's distribution internals.
struct Rng {
    std::mt19937_64 gen;

    explicit Rng(std::uint64_t seed) : gen(seed) {}

    std::uint64_t next() { return gen(); }

    // Uniform double in [lo, hi).
    double uniform(double lo, double hi) {
        double u = (gen() >> 11) * 0x1.0p-53;
        return lo + u * (hi - lo);
    }

    // Uniform integer in [lo, hi] inclusive.
    int uniform_int(int lo, int hi) {
        std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(gen() % span);
    }

    bool bernoulli(double p) { return uniform(0.0, 1.0) < p; }
};

// Error taxonomy. Solvers throw; checkers report.
class SchedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ZeroSpeedError : public SchedError { public: using SchedError::SchedError; };
class InfeasibleError : public SchedError { public: using SchedError::SchedError; };
class NotWellStructuredError : public SchedError { public: using SchedError::SchedError; };
class TooLargeError : public SchedError { public: using SchedError::SchedError; };
class OracleInconsistentError : public SchedError { public: using SchedError::SchedError; };
class NotPseudoforestError : public SchedError { public: using SchedError::SchedError; };
class NumericFailureError : public SchedError { public: using SchedError::SchedError; };
class BoundsInvertedError : public SchedError { public: using SchedError::SchedError; };
class ShortBudgetError : public SchedError { public: using SchedError::SchedError; };
class OrphanJobError : public SchedError { public: using SchedError::SchedError; };
class EmptyChoiceError : public SchedError { public: using SchedError::SchedError; };
class NonMatroidInstanceError : public SchedError { public: using SchedError::SchedError; };
class NotIdenticalError : public SchedError { public: using SchedError::SchedError; };
// Raised when a run-time audit of a proven bound fails; always a bug signal.
class AuditError : public SchedError { public: using SchedError::SchedError; };

}  // namespace malsched
