#pragma once

#include <string>
#include <utility>
#include <vector>

#include "malsched/common.hpp"
#include "malsched/speed.hpp"

namespace malsched {

// Jobs 0..n-1 on machines 0..m-1, one speed oracle per job. Immutable after
// construction; processing time of job j on set S is 1/g_j(S).
struct Instance {
    int num_jobs = 0;
    int num_machines = 0;
    std::vector<SpeedPtr> speed;

    Instance() = default;
    Instance(int jobs, int machines, std::vector<SpeedPtr> speeds);

    double speed_of(int job, MachineSet s) const { return speed[job]->eval(s); }
    // +inf when the set has zero speed.
    double time_of(int job, MachineSet s) const {
        double g = speed_of(job, s);
        return g > 0.0 ? 1.0 / g : kInf;
    }
};

// Per-job machine sets; sets[j] must be non-empty for an assigned job.
struct Assignment {
    std::vector<MachineSet> sets;
};

// Assignment plus start times; job j occupies (starts[j], starts[j] + f_j)
// on every machine of its set.
struct Schedule {
    Assignment assignment;
    std::vector<double> starts;
};

struct LoadProfile {
    std::vector<double> load;
    double max_load = 0.0;
};

struct ViolationReport {
    bool ok = true;
    int job_a = -1;
    int job_b = -1;
    int machine = -1;
    std::string message;
};

// Exact per-machine sums of processing times. Throws ZeroSpeedError when a
// job's committed set has zero speed (empty sets included).
LoadProfile machine_loads(const Instance& instance, const Assignment& assignment);

// max_j (t_j + f_j(S_j)); validates the schedule first and throws
// InfeasibleError on any violation.
double makespan(const Instance& instance, const Schedule& schedule);

// Accepts iff no two jobs sharing a machine overlap as open intervals.
// Comparisons are exact; constructed start times are exact sums.
ViolationReport verify_schedule(const Instance& instance, const Schedule& schedule);

// True iff every machine belongs to at most one multi-machine job set.
bool is_well_structured(const Assignment& assignment);

// Multi-machine jobs start at 0; singleton jobs follow sequentially on their
// machine in job-id order. Resulting makespan equals the max machine load.
Schedule schedule_from_well_structured(const Instance& instance, const Assignment& assignment);

// n jobs on n(n-1)/2 machines (edges of the complete graph on n nodes); a job
// runs at speed 1 only on supersets of its n-1 incident edges. The canonical
// assignment gives every machine load exactly 2 while any feasible schedule
// needs makespan n.
std::pair<Instance, Assignment> gen_clique_gap_instance(int n);

}  // namespace malsched
