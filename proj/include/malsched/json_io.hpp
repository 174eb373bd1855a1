#pragma once

#include <string>

#include "json.hpp"

#include "malsched/core.hpp"

namespace malsched {

// Instance wire format:
//   {"jobs": n, "machines": m, "speeds": [{"kind": ...}, ...], "meta": {...}}
// meta is optional and ignored on load.
nlohmann::ordered_json instance_to_json(const Instance& instance);
Instance instance_from_json(const nlohmann::json& j);

// Assignments and schedules share one shape: {"sets": [[...]], "starts": [...]}
// with starts optional for bare assignments.
nlohmann::ordered_json assignment_to_json(const Assignment& assignment);
Assignment assignment_from_json(const nlohmann::json& j);
nlohmann::ordered_json schedule_to_json(const Schedule& schedule);
Schedule schedule_from_json(const nlohmann::json& j);

Instance load_instance(const std::string& path);
void save_json(const nlohmann::ordered_json& j, const std::string& path);
nlohmann::json load_json(const std::string& path);

}  // namespace malsched
