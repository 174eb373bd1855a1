#include "malsched/json_io.hpp"

#include <fstream>

namespace malsched {

nlohmann::ordered_json instance_to_json(const Instance& instance) {
    nlohmann::ordered_json speeds = nlohmann::ordered_json::array();
    for (const auto& g : instance.speed) speeds.push_back(g->to_json());
    return {{"jobs", instance.num_jobs}, {"machines", instance.num_machines}, {"speeds", speeds}};
}

Instance instance_from_json(const nlohmann::json& j) {
    int jobs = j.at("jobs").get<int>();
    int machines = j.at("machines").get<int>();
    std::vector<SpeedPtr> speeds;
    for (const auto& s : j.at("speeds")) speeds.push_back(speed_from_json(s));
    return Instance(jobs, machines, std::move(speeds));
}

nlohmann::ordered_json assignment_to_json(const Assignment& assignment) {
    nlohmann::ordered_json sets = nlohmann::ordered_json::array();
    for (MachineSet s : assignment.sets) sets.push_back(set_to_vector(s));
    return {{"sets", sets}};
}

Assignment assignment_from_json(const nlohmann::json& j) {
    Assignment assignment;
    for (const auto& ids : j.at("sets"))
        assignment.sets.push_back(set_from_vector(ids.get<std::vector<int>>()));
    return assignment;
}

nlohmann::ordered_json schedule_to_json(const Schedule& schedule) {
    nlohmann::ordered_json out = assignment_to_json(schedule.assignment);
    out["starts"] = schedule.starts;
    return out;
}

Schedule schedule_from_json(const nlohmann::json& j) {
    Schedule schedule;
    schedule.assignment = assignment_from_json(j);
    if (j.contains("starts"))
        schedule.starts = j.at("starts").get<std::vector<double>>();
    else
        schedule.starts.assign(schedule.assignment.sets.size(), 0.0);
    return schedule;
}

Instance load_instance(const std::string& path) { return instance_from_json(load_json(path)); }

void save_json(const nlohmann::ordered_json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

}  // namespace malsched
