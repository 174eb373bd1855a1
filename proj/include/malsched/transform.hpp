#pragma once

#include <vector>

#include "malsched/core.hpp"
#include "malsched/lp.hpp"

namespace malsched {

// Per-(machine, job) shares of each job's speed on its assigned set:
// shares sum to g_j(S_j) per job and are dominated by g_j on every subset.
struct SpeedShares {
    // shares[j] is dense over machines; zero outside S_j.
    std::vector<std::vector<double>> shares;
    // Machines with share above the support threshold, per job.
    std::vector<MachineSet> support;
    // Per-job share totals; equals g_j(S_j) for exact modes, can fall short
    // of it in the tolerant cover mode used for merely-subadditive speeds.
    std::vector<double> total;
    // Set when a negative marginal was clamped (non-monotone input); the sum
    // equality may then fail and the run is out of contract.
    bool clamped_negative = false;
};

// Greedy marginal shares for submodular speeds: walk S_j in `machine_order`
// and give each machine its marginal gain. `machine_order` is a permutation
// of machine ids; ascending ids by default.
SpeedShares greedy_speed_shares(const Instance& instance, const Assignment& assignment,
                                const std::vector<int>& machine_order = {});

// Shares for fractionally subadditive speeds via the exponential cover LP
// (one column per subset of S_j, |S_j| <= 16). The shares are read off the
// LP duals. With tolerate_shortfall false a cover optimum below g_j(S_j)
// raises ShortBudgetError (the input is not XOS); with it true the shortfall
// is kept as the job's share total, which is how merely-subadditive speeds
// enter the pipeline.
SpeedShares cover_lp_speed_shares(const Instance& instance, const Assignment& assignment,
                                  bool tolerate_shortfall = false);

// Feasibility LP over x_ij for i in the share support: each job covers
// weight >= 1, each machine carries share-weighted load <= C. Feasible by
// construction whenever C is at least the assignment's max load.
struct ShareLp {
    LinearProgram lp;
    std::vector<std::pair<int, int>> var_pairs;  // var index -> (job, machine)
};
ShareLp build_share_lp(const Instance& instance, const Assignment& assignment,
                       const SpeedShares& shares, double C);

// Jobs split by the oriented support graph: a job either keeps its parent
// machine (LP weight > 1/2) or moves to its child machines.
struct ClassifiedAssignment {
    std::vector<int> parent;             // machine id or -1
    std::vector<MachineSet> children;    // child machines per job
    std::vector<char> is_single;         // true: singleton {parent}
    std::vector<double> single_lp_load;  // per machine: LP load of kept singles
};

ClassifiedAssignment classify_assignments(const Instance& instance, const ShareLp& share_lp,
                                          const BasicSolution& solution,
                                          const SpeedShares& shares);

// Threshold trim for jobs assigned to child sets: keep only machines whose
// singleton LP load is below the best threshold; candidates are exactly the
// distinct load values. EmptyChoiceError when every candidate set has zero
// speed.
Assignment trim_shared_sets(const Instance& instance, const ClassifiedAssignment& classified,
                            double C);

enum class ShareMode { Greedy, CoverLp, CoverLpTolerant };

struct TransformReport {
    double input_load = 0.0;
    double output_load = 0.0;
    double ratio = 0.0;
    int single_jobs = 0;
    int shared_jobs = 0;
    double max_single_load = 0.0;        // <= 2C by construction
    double max_shared_time_pretrim = 0.0;  // <= 2C by construction
    bool clamped_negative = false;
};

// Full pipeline: shares, share LP, pseudoforest orientation, classification,
// threshold trim. Output is well-structured with max load at most
// 2e/(e-1) times the input load; the factor is audited on every run.
std::pair<Assignment, TransformReport> transform_assignment(const Instance& instance,
                                                            const Assignment& assignment,
                                                            ShareMode mode = ShareMode::Greedy);

// Subadditive speeds: shares come from the tolerant cover LP, whose optimum
// is the best fractionally subadditive approximation of g_j at the assigned
// set; the guarantee weakens by a ln(m) factor.
std::pair<Assignment, TransformReport> transform_subadditive(const Instance& instance,
                                                             const Assignment& assignment);

// Worst-case load growth of the transformation, 2e/(e-1).
inline double transform_ratio_bound() { return 2.0 * M_E / (M_E - 1.0); }

}  // namespace malsched
