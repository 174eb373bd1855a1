#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "malsched/core.hpp"
#include "malsched/matroid.hpp"

namespace malsched {

// View of an instance whose speeds are all scaled matroid ranks.
struct MatroidJob {
    MatroidPtr matroid;
    double quota = 0.0;
};

// Throws NonMatroidInstanceError unless every oracle is a ScaledMatroidRankSpeed.
std::vector<MatroidJob> matroid_view(const Instance& instance);

// Jobs split by the machine count t_j = ceil(quota_j / C) they need at level
// C: single-machine jobs (t_j = 1) versus the rest (t_j >= 2).
struct JobSplit {
    std::vector<int> machines_needed;
    std::vector<int> single_jobs;
    std::vector<int> multi_jobs;
};

JobSplit split_jobs(const Instance& instance, double C);

// Infeasibility certificate: no assignment of maximum load <= level exists.
struct Certificate {
    double level = 0.0;
    std::string reason;
};

// Step 1: assignment LP for the single-machine jobs (processing time quota_j
// on machines whose singleton is independent), rounded to one machine per
// job with per-machine load <= 2C. Infeasible LP certifies level C.
struct SingleAssignment {
    std::vector<int> machine_of;  // indexed by job id, -1 for multi jobs
};
std::variant<SingleAssignment, Certificate> step1_single_machine(const Instance& instance,
                                                                 const JobSplit& split,
                                                                 double C);

// Step 2: maximum common independent set between the direct sum of the
// t_j-truncated job matroids and the two-copies-per-machine partition
// matroid, over ground M x multi_jobs. Success means every multi job received
// exactly t_j machines.
struct IntersectionResult {
    std::vector<std::pair<int, int>> picked;  // (machine, job)
    std::vector<MachineSet> sets;             // per job id; 0 for single jobs
};
std::variant<IntersectionResult, Certificate> step2_intersection(const Instance& instance,
                                                                 const JobSplit& split,
                                                                 double C);

// Step 3a: union of both partial assignments; max load <= 4C.
Assignment step3a_merge(const Instance& instance, const JobSplit& split,
                        const SingleAssignment& singles, const IntersectionResult& inter);

// Step 3b: shrink each multi job to the machines oriented toward it (one
// shared job per machine, at least floor(t_j/2) machines kept), then schedule
// the well-structured result; makespan <= 5C.
struct WellStructuredResult {
    Assignment assignment;
    Schedule schedule;
};
WellStructuredResult step3b_schedule(const Instance& instance, const JobSplit& split,
                                     const SingleAssignment& singles,
                                     const IntersectionResult& inter);

// Decision procedure at level C: assignment of load <= 4C and schedule of
// makespan <= 5C, or nullopt when a step certified infeasibility.
struct MatroidDecision {
    Assignment assignment;
    Schedule schedule;
};
std::optional<MatroidDecision> matroid_decision(const Instance& instance, double C);

// Binary search over the decision procedure. The returned assignment has
// load <= 4(1+rel_tol) OPT and the schedule makespan <= 5(1+rel_tol) OPT.
struct MatroidSolution {
    Assignment assignment;
    Schedule schedule;
    double level = 0.0;
};
MatroidSolution solve_matroid(const Instance& instance, double rel_tol = 1e-6);

}  // namespace malsched
