#include "malsched/core.hpp"

#include <algorithm>
#include <map>

namespace malsched {

Instance::Instance(int jobs, int machines, std::vector<SpeedPtr> speeds)
    : num_jobs(jobs), num_machines(machines), speed(std::move(speeds)) {
    if (num_jobs < 1) throw std::invalid_argument("Instance: need at least one job");
    if (num_machines < 1) throw std::invalid_argument("Instance: need at least one machine");
    if (num_machines > kMaxMachines)
        throw std::invalid_argument("Instance: at most 64 machines supported");
    if (static_cast<int>(speed.size()) != num_jobs)
        throw std::invalid_argument("Instance: one speed oracle per job required");
    for (const auto& g : speed) {
        if (!g) throw std::invalid_argument("Instance: null speed oracle");
        if (g->eval(0) != 0.0)
            throw std::invalid_argument("Instance: speed of the empty set must be 0");
    }
}

LoadProfile machine_loads(const Instance& instance, const Assignment& assignment) {
    LoadProfile profile;
    profile.load.assign(instance.num_machines, 0.0);
    for (int j = 0; j < instance.num_jobs; ++j) {
        MachineSet s = assignment.sets[j];
        double g = instance.speed_of(j, s);
        if (!(g > 0.0))
            throw ZeroSpeedError("job " + std::to_string(j) +
                                 " has zero speed on its assigned set");
        double f = 1.0 / g;
        for_each_member(s, [&](int i) { profile.load[i] += f; });
    }
    profile.max_load = 0.0;
    for (double l : profile.load) profile.max_load = std::max(profile.max_load, l);
    return profile;
}

ViolationReport verify_schedule(const Instance& instance, const Schedule& schedule) {
    const Assignment& assignment = schedule.assignment;
    ViolationReport report;
    for (int j = 0; j < instance.num_jobs; ++j) {
        if (assignment.sets[j] == 0) {
            report.ok = false;
            report.job_a = j;
            report.message = "job " + std::to_string(j) + " has an empty machine set";
            return report;
        }
        if (assignment.sets[j] & ~full_set(instance.num_machines)) {
            report.ok = false;
            report.job_a = j;
            report.message = "job " + std::to_string(j) + " uses an unknown machine";
            return report;
        }
        if (schedule.starts[j] < 0.0) {
            report.ok = false;
            report.job_a = j;
            report.message = "job " + std::to_string(j) + " starts before time 0";
            return report;
        }
        if (!(instance.speed_of(j, assignment.sets[j]) > 0.0)) {
            report.ok = false;
            report.job_a = j;
            report.message = "job " + std::to_string(j) + " has zero speed on its set";
            return report;
        }
    }
    for (int a = 0; a < instance.num_jobs; ++a) {
        double a0 = schedule.starts[a];
        double a1 = a0 + instance.time_of(a, assignment.sets[a]);
        for (int b = a + 1; b < instance.num_jobs; ++b) {
            MachineSet shared = assignment.sets[a] & assignment.sets[b];
            if (!shared) continue;
            double b0 = schedule.starts[b];
            double b1 = b0 + instance.time_of(b, assignment.sets[b]);
            // Open intervals: back-to-back is fine.
            if (a0 < b1 && b0 < a1) {
                report.ok = false;
                report.job_a = a;
                report.job_b = b;
                report.machine = std::countr_zero(shared);
                report.message = "jobs " + std::to_string(a) + " and " + std::to_string(b) +
                                 " overlap on machine " + std::to_string(report.machine);
                return report;
            }
        }
    }
    return report;
}

double makespan(const Instance& instance, const Schedule& schedule) {
    ViolationReport report = verify_schedule(instance, schedule);
    if (!report.ok) throw InfeasibleError("infeasible schedule: " + report.message);
    double cmax = 0.0;
    for (int j = 0; j < instance.num_jobs; ++j)
        cmax = std::max(cmax,
                        schedule.starts[j] + instance.time_of(j, schedule.assignment.sets[j]));
    return cmax;
}

bool is_well_structured(const Assignment& assignment) {
    MachineSet seen = 0;
    for (MachineSet s : assignment.sets) {
        if (set_size(s) <= 1) continue;
        if (seen & s) return false;
        seen |= s;
    }
    return true;
}

Schedule schedule_from_well_structured(const Instance& instance, const Assignment& assignment) {
    if (!is_well_structured(assignment))
        throw NotWellStructuredError("assignment is not well-structured");

    Schedule schedule;
    schedule.assignment = assignment;
    schedule.starts.assign(instance.num_jobs, 0.0);

    // Shared jobs hold time 0; singles queue behind them per machine.
    std::vector<double> machine_free(instance.num_machines, 0.0);
    for (int j = 0; j < instance.num_jobs; ++j) {
        MachineSet s = assignment.sets[j];
        if (set_size(s) <= 1) continue;
        double g = instance.speed_of(j, s);
        if (!(g > 0.0)) throw ZeroSpeedError("zero speed on shared set");
        schedule.starts[j] = 0.0;
        for_each_member(s, [&](int i) { machine_free[i] = 1.0 / g; });
    }
    for (int j = 0; j < instance.num_jobs; ++j) {
        MachineSet s = assignment.sets[j];
        if (set_size(s) != 1) continue;
        int i = std::countr_zero(s);
        double g = instance.speed_of(j, s);
        if (!(g > 0.0)) throw ZeroSpeedError("zero speed on singleton set");
        schedule.starts[j] = machine_free[i];
        machine_free[i] += 1.0 / g;
    }
    return schedule;
}

std::pair<Instance, Assignment> gen_clique_gap_instance(int n) {
    if (n < 2) throw std::invalid_argument("gen_clique_gap_instance: n >= 2 required");
    int m = n * (n - 1) / 2;
    if (m > kMaxMachines)
        throw std::invalid_argument("gen_clique_gap_instance: too many machines");

    // Machine ids enumerate node pairs (a, b), a < b, lexicographically.
    std::map<std::pair<int, int>, int> edge_id;
    int next = 0;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) edge_id[{a, b}] = next++;

    std::vector<SpeedPtr> speeds;
    Assignment assignment;
    for (int node = 0; node < n; ++node) {
        MachineSet incident = 0;
        for (int other = 0; other < n; ++other) {
            if (other == node) continue;
            auto key = std::minmax(node, other);
            incident = set_with(incident, edge_id[{key.first, key.second}]);
        }
        speeds.push_back(std::make_shared<SupersetThresholdSpeed>(incident, 1.0));
        assignment.sets.push_back(incident);
    }
    return {Instance(n, m, std::move(speeds)), std::move(assignment)};
}

}  // namespace malsched
