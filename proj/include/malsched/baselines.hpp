#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "malsched/core.hpp"

namespace malsched {

struct MilpLimits {
    long max_nodes = 50'000'000;
    double time_limit_s = 120.0;
};

struct MilpResult {
    enum class Status { Optimal, Limit };
    Status status = Status::Optimal;
    double value = 0.0;       // best incumbent max load
    double best_bound = 0.0;  // proven lower bound (equals value when Optimal)
    Assignment assignment;
    long nodes = 0;
};

// Exact minimum max-load assignment by branch and bound over per-job machine
// subsets: jobs in decreasing full-set time, subsets in decreasing speed,
// pruned by the incumbent and by the LP lower bound. Subset-indexed, so
// limited to m <= 14.
MilpResult exact_milp(const Instance& instance, const MilpLimits& limits = {});

// LP relaxation: fractional singleton assignment plus the full-set time of
// every job as a floor. Always a valid lower bound on the optimal load.
// Jobs with no positive singleton speed rely on the full-set constraint only.
double lp_lower_bound(const Instance& instance);

struct GeneratorConfig {
    std::string family;  // coverage | budget_additive | matroid_matching | matroid_rank | clique_gap
    int n = 1;
    int m = 1;
    std::uint64_t seed = 0;

    // Family parameters; unset fields take the standard defaults below.
    std::optional<double> frequency;      // coverage / matroid_matching edge probability
    std::optional<int> slots;             // k
    std::optional<int> groups;            // b
    std::optional<int> rank;              // r
    std::optional<double> weight_max;     // w_max
    std::optional<double> budget_max;     // W_max
    double load_lo = 1.0, load_hi = 1000.0;
    // Uses k = b = m + 1 for matroid_matching (the dense variant that keeps
    // optimal assignments from collapsing to singletons on small m).
    bool matching_dense = false;

    std::string id() const;
};

// Defaults: coverage p = 0.2, k = m; budget-additive w_max = 100,
// W_max = 100 m; matroid-matching w_max = 100, p = 0.1, r = 2,
// k = floor(m/4) + 1, b = floor(m/8) + 1; loads U[1, 1000].
// Same seed, same instance, bit for bit.
Instance generate(const GeneratorConfig& config);

struct BenchRecord {
    std::string instance_id;
    std::string family;
    int n = 0;
    int m = 0;
    std::uint64_t seed = 0;
    std::string algo;
    double lower_bound = 0.0;
    double load = 0.0;
    double makespan_value = 0.0;
    double ratio_load = 0.0;
    double ratio_makespan = 0.0;
    double ms = 0.0;
};

std::string bench_csv_header();
std::string to_csv_row(const BenchRecord& record);
BenchRecord parse_csv_row(const std::string& line);

struct SuiteConfig {
    std::vector<GeneratorConfig> instances;
    std::vector<std::string> algos;  // submodular | matroid | exact | transform | identical
    int milp_max_m = 5;              // exact bound used when m is at most this
    double rel_tol = 1e-6;
    int threads = 0;                 // 0: hardware default
};

SuiteConfig suite_from_json(const nlohmann::json& j);

// Generates, bounds, solves and re-verifies every (instance, algo) pair in a
// worker pool; rows come back in deterministic (instance, algo) order.
// Failed runs carry an "error:" algo suffix and the run continues.
std::vector<BenchRecord> run_benchmark(const SuiteConfig& suite, std::ostream& log);

void write_csv(const std::vector<BenchRecord>& records, std::ostream& out);
void print_summary(const std::vector<BenchRecord>& records, std::ostream& out);

struct GanttRect {
    int machine = 0;
    int job = 0;
    double t0 = 0.0;
    double t1 = 0.0;
};

// One lane per machine; every job paints [start, completion] across the
// lanes of its machine set.
std::vector<GanttRect> gantt_rects(const Instance& instance, const Schedule& schedule);
std::string emit_gantt(const Instance& instance, const Schedule& schedule);

}  // namespace malsched
