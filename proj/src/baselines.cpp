#include "malsched/baselines.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "malsched/lp.hpp"
#include "malsched/matroid.hpp"
#include "malsched/matroid_scheduler.hpp"
#include "malsched/submodular.hpp"
#include "malsched/transform.hpp"

namespace malsched {

// ---------------------------------------------------------------------------
// Exact branch and bound

namespace {

struct SubsetChoice {
    MachineSet set;
    double time;
    double work;  // time * |set|
};

struct BnbState {
    const Instance* instance;
    std::vector<int> job_order;
    std::vector<std::vector<SubsetChoice>> choices;  // per job, decreasing speed
    std::vector<double> min_time;                    // per job in job_order
    std::vector<double> min_work_suffix;
    std::vector<double> loads;
    std::vector<MachineSet> current;
    std::vector<MachineSet> best_sets;
    double incumbent = kInf;
    double lower_bound = 0.0;
    long nodes = 0;
    long max_nodes = 0;
    std::chrono::steady_clock::time_point deadline;
    bool hit_limit = false;

    bool limit_reached() {
        if (++nodes % 4096 == 0 && std::chrono::steady_clock::now() > deadline)
            hit_limit = true;
        if (nodes > max_nodes) hit_limit = true;
        return hit_limit;
    }

    void dfs(size_t depth, double current_max, double used_work) {
        if (hit_limit) return;
        if (current_max >= incumbent) return;
        if (depth == job_order.size()) {
            incumbent = current_max;
            best_sets = current;
            return;
        }
        // Average-load bound over the remaining work.
        double pending = used_work + min_work_suffix[depth];
        if (std::max(current_max, pending / instance->num_machines) >= incumbent) return;
        if (limit_reached()) return;

        int j = job_order[depth];
        for (const SubsetChoice& choice : choices[depth]) {
            if (choice.time >= incumbent) break;  // sorted: the rest is slower
            double new_max = current_max;
            bool overload = false;
            for_each_member(choice.set, [&](int i) {
                loads[i] += choice.time;
                new_max = std::max(new_max, loads[i]);
            });
            overload = new_max >= incumbent;
            if (!overload) {
                current[j] = choice.set;
                dfs(depth + 1, new_max, used_work + choice.work);
                current[j] = 0;
            }
            for_each_member(choice.set, [&](int i) { loads[i] -= choice.time; });
            if (incumbent <= lower_bound * (1 + 1e-12)) return;  // proven optimal
        }
    }
};

}  // namespace

MilpResult exact_milp(const Instance& instance, const MilpLimits& limits) {
    if (instance.num_machines > 14)
        throw TooLargeError("exact_milp: subset branching needs m <= 14");

    BnbState state;
    state.instance = &instance;
    state.max_nodes = limits.max_nodes;
    state.deadline = std::chrono::steady_clock::now() +
                     std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                         std::chrono::duration<double>(limits.time_limit_s));
    state.loads.assign(instance.num_machines, 0.0);
    state.current.assign(instance.num_jobs, 0);
    state.lower_bound = lp_lower_bound(instance);

    // Hardest-first: jobs by decreasing full-set processing time.
    state.job_order.resize(instance.num_jobs);
    for (int j = 0; j < instance.num_jobs; ++j) state.job_order[j] = j;
    MachineSet all = full_set(instance.num_machines);
    std::stable_sort(state.job_order.begin(), state.job_order.end(), [&](int a, int b) {
        return instance.time_of(a, all) > instance.time_of(b, all);
    });

    for (int j : state.job_order) {
        std::vector<SubsetChoice> options;
        for_each_submask(all, [&](MachineSet s) {
            double g = instance.speed_of(j, s);
            if (!(g > 0.0)) return;
            options.push_back({s, 1.0 / g, static_cast<double>(set_size(s)) / g});
        });
        if (options.empty())
            throw ZeroSpeedError("exact_milp: job " + std::to_string(j) +
                                 " has no set with positive speed");
        std::stable_sort(options.begin(), options.end(),
                         [](const SubsetChoice& a, const SubsetChoice& b) {
                             if (a.time != b.time) return a.time < b.time;
                             return set_size(a.set) < set_size(b.set);
                         });
        state.choices.push_back(std::move(options));
        state.min_time.push_back(state.choices.back().front().time);
    }
    state.min_work_suffix.assign(instance.num_jobs + 1, 0.0);
    for (int d = instance.num_jobs - 1; d >= 0; --d) {
        double min_work = kInf;
        for (const SubsetChoice& c : state.choices[d]) min_work = std::min(min_work, c.work);
        state.min_work_suffix[d] = state.min_work_suffix[d + 1] + min_work;
    }

    state.dfs(0, 0.0, 0.0);

    MilpResult result;
    result.nodes = state.nodes;
    if (state.best_sets.empty())
        throw SchedError("exact_milp: no incumbent found within limits");
    result.assignment.sets = state.best_sets;
    result.value = machine_loads(instance, result.assignment).max_load;
    result.status = state.hit_limit ? MilpResult::Status::Limit : MilpResult::Status::Optimal;
    result.best_bound = state.hit_limit ? state.lower_bound : result.value;
    return result;
}

double lp_lower_bound(const Instance& instance) {
    MachineSet all = full_set(instance.num_machines);
    double floor_time = 0.0;
    for (int j = 0; j < instance.num_jobs; ++j) {
        double g = instance.speed_of(j, all);
        if (!(g > 0.0))
            throw ZeroSpeedError("lp_lower_bound: job " + std::to_string(j) +
                                 " has zero speed on the full machine set");
        floor_time = std::max(floor_time, 1.0 / g);
    }

    LinearProgram lp;
    int c_var = lp.add_var(1.0, floor_time);
    std::vector<std::vector<std::pair<int, double>>> machine_terms(instance.num_machines);
    for (int j = 0; j < instance.num_jobs; ++j) {
        std::vector<std::pair<int, double>> job_terms;
        for (int i = 0; i < instance.num_machines; ++i) {
            double g = instance.speed_of(j, singleton(i));
            if (!(g > 0.0)) continue;
            int v = lp.add_var();
            job_terms.emplace_back(v, 1.0);
            machine_terms[i].emplace_back(v, 1.0 / g);
        }
        // Jobs with no usable singleton rely on the full-set floor alone.
        if (!job_terms.empty())
            lp.add_row(std::move(job_terms), LinearProgram::Sense::GreaterEq, 1.0);
    }
    for (int i = 0; i < instance.num_machines; ++i) {
        if (machine_terms[i].empty()) continue;
        machine_terms[i].emplace_back(c_var, -1.0);
        lp.add_row(std::move(machine_terms[i]), LinearProgram::Sense::LessEq, 0.0);
    }
    BasicSolution sol = solve_lp(lp);
    if (sol.status != BasicSolution::Status::Optimal)
        throw NumericFailureError("lp_lower_bound: relaxation did not solve");
    return sol.objective;
}

// ---------------------------------------------------------------------------
// Generators

std::string GeneratorConfig::id() const {
    std::ostringstream out;
    out << family << "-n" << n << "-m" << m << "-s" << seed;
    if (matching_dense) out << "-dense";
    return out.str();
}

Instance generate(const GeneratorConfig& config) {
    Rng rng(config.seed);
    const int n = config.n;
    const int m = config.m;

    if (config.family == "clique_gap") {
        return gen_clique_gap_instance(n).first;
    }

    std::vector<SpeedPtr> speeds;
    speeds.reserve(n);
    if (config.family == "coverage") {
        const double p = config.frequency.value_or(0.2);
        const int k = config.slots.value_or(m);
        for (int j = 0; j < n; ++j) {
            std::vector<std::uint64_t> slots(m, 0);
            for (int i = 0; i < m; ++i)
                for (int s = 0; s < k; ++s)
                    if (rng.bernoulli(p)) slots[i] |= std::uint64_t{1} << s;
            double load = rng.uniform(config.load_lo, config.load_hi);
            speeds.push_back(std::make_shared<CoverageSpeed>(k, std::move(slots), load));
        }
    } else if (config.family == "budget_additive") {
        const double w_max = config.weight_max.value_or(100.0);
        const double budget_max = config.budget_max.value_or(100.0 * m);
        for (int j = 0; j < n; ++j) {
            double budget = rng.uniform(1.0, budget_max);
            std::vector<double> weights(m);
            for (int i = 0; i < m; ++i) weights[i] = rng.uniform(1.0, w_max);
            double load = rng.uniform(config.load_lo, config.load_hi);
            speeds.push_back(
                std::make_shared<BudgetAdditiveSpeed>(std::move(weights), budget, load));
        }
    } else if (config.family == "matroid_matching") {
        const double w_max = config.weight_max.value_or(100.0);
        const double p = config.frequency.value_or(0.1);
        const int r = config.rank.value_or(2);
        const int k = config.slots.value_or(config.matching_dense ? m + 1 : m / 4 + 1);
        const int b = config.groups.value_or(config.matching_dense ? m + 1 : m / 8 + 1);
        for (int j = 0; j < n; ++j) {
            std::vector<double> slot_weights(k);
            for (int s = 0; s < k; ++s) slot_weights[s] = rng.uniform(1.0, w_max);
            std::vector<std::vector<int>> edges(k);
            for (int s = 0; s < k; ++s)
                for (int i = 0; i < m; ++i)
                    if (rng.bernoulli(p)) edges[s].push_back(i);
            std::vector<int> group_of(k);
            for (int s = 0; s < k; ++s) group_of[s] = rng.uniform_int(0, b - 1);
            double load = rng.uniform(config.load_lo, config.load_hi);
            speeds.push_back(std::make_shared<MatroidMatchingSpeed>(
                std::move(slot_weights), std::move(edges), std::move(group_of), r, load));
        }
    } else if (config.family == "matroid_rank") {
        // Random partition matroids: machines grouped uniformly, per-group
        // capacity 1 or 2, quota on the load scale of the other families.
        const int b = config.groups.value_or(m / 4 + 2);
        for (int j = 0; j < n; ++j) {
            std::vector<int> group_of(m);
            for (int i = 0; i < m; ++i) group_of[i] = rng.uniform_int(0, b - 1);
            std::vector<int> caps(b);
            for (int g = 0; g < b; ++g) caps[g] = rng.uniform_int(1, 2);
            double quota = rng.uniform(config.load_lo, config.load_hi);
            speeds.push_back(std::make_shared<ScaledMatroidRankSpeed>(
                partition_matroid(std::move(group_of), std::move(caps)), quota));
        }
    } else {
        throw std::invalid_argument("generate: unknown family " + config.family);
    }
    return Instance(n, m, std::move(speeds));
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace

std::string bench_csv_header() {
    return "instance_id,family,n,m,seed,algo,lower_bound,load,makespan,ratio_load,"
           "ratio_makespan,ms";
}

std::string to_csv_row(const BenchRecord& r) {
    std::ostringstream out;
    out << r.instance_id << ',' << r.family << ',' << r.n << ',' << r.m << ',' << r.seed << ','
        << r.algo << ',' << format_double(r.lower_bound) << ',' << format_double(r.load) << ','
        << format_double(r.makespan_value) << ',' << format_double(r.ratio_load) << ','
        << format_double(r.ratio_makespan) << ',' << format_double(r.ms);
    return out.str();
}

BenchRecord parse_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (fields.size() != 12) throw std::invalid_argument("csv row needs 12 fields");
    BenchRecord r;
    r.instance_id = fields[0];
    r.family = fields[1];
    r.n = std::stoi(fields[2]);
    r.m = std::stoi(fields[3]);
    r.seed = std::stoull(fields[4]);
    r.algo = fields[5];
    r.lower_bound = std::stod(fields[6]);
    r.load = std::stod(fields[7]);
    r.makespan_value = std::stod(fields[8]);
    r.ratio_load = std::stod(fields[9]);
    r.ratio_makespan = std::stod(fields[10]);
    r.ms = std::stod(fields[11]);
    return r;
}

// ---------------------------------------------------------------------------
// Benchmark runner

SuiteConfig suite_from_json(const nlohmann::json& j) {
    SuiteConfig suite;
    for (const auto& e : j.at("instances")) {
        GeneratorConfig config;
        config.family = e.at("family").get<std::string>();
        config.n = e.at("n").get<int>();
        config.m = e.value("m", 1);
        config.seed = e.value("seed", 0ull);
        if (e.contains("frequency")) config.frequency = e["frequency"].get<double>();
        if (e.contains("slots")) config.slots = e["slots"].get<int>();
        if (e.contains("groups")) config.groups = e["groups"].get<int>();
        if (e.contains("rank")) config.rank = e["rank"].get<int>();
        if (e.contains("weight_max")) config.weight_max = e["weight_max"].get<double>();
        if (e.contains("budget_max")) config.budget_max = e["budget_max"].get<double>();
        config.matching_dense = e.value("matching_dense", false);
        suite.instances.push_back(std::move(config));
    }
    suite.algos = j.at("algos").get<std::vector<std::string>>();
    suite.milp_max_m = j.value("milp_max_m", 5);
    suite.rel_tol = j.value("rel_tol", 1e-6);
    suite.threads = j.value("threads", 0);
    return suite;
}

namespace {

BenchRecord run_one(const GeneratorConfig& config, const std::string& algo, int milp_max_m,
                    double rel_tol) {
    BenchRecord record;
    record.instance_id = config.id();
    record.family = config.family;
    record.n = config.n;
    record.m = config.m;
    record.seed = config.seed;
    record.algo = algo;

    Instance instance = generate(config);
    record.m = instance.num_machines;  // clique_gap derives m from n

    bool exact_bound = instance.num_machines <= milp_max_m;
    MilpResult milp;
    if (exact_bound || algo == "exact" || algo == "transform") milp = exact_milp(instance);
    record.lower_bound = exact_bound ? milp.value : lp_lower_bound(instance);

    auto started = std::chrono::steady_clock::now();
    Assignment assignment;
    Schedule schedule;
    bool have_schedule = true;
    if (algo == "submodular") {
        SubmodularSolution sol = solve_submodular(instance, rel_tol);
        assignment = std::move(sol.assignment);
        schedule = std::move(sol.schedule);
    } else if (algo == "matroid") {
        MatroidSolution sol = solve_matroid(instance, rel_tol);
        assignment = std::move(sol.assignment);
        schedule = std::move(sol.schedule);
    } else if (algo == "identical") {
        IdenticalSolution sol = solve_identical(instance, rel_tol);
        schedule = std::move(sol.schedule);
        assignment = schedule.assignment;
    } else if (algo == "exact") {
        assignment = milp.assignment;
        have_schedule = false;
    } else if (algo == "transform") {
        auto [transformed, report] = transform_assignment(instance, milp.assignment);
        assignment = std::move(transformed);
        schedule = schedule_from_well_structured(instance, assignment);
    } else {
        throw std::invalid_argument("unknown algorithm: " + algo);
    }
    auto elapsed = std::chrono::steady_clock::now() - started;
    record.ms = std::chrono::duration<double, std::milli>(elapsed).count();

    record.load = machine_loads(instance, assignment).max_load;
    record.ratio_load = record.load / record.lower_bound;
    if (have_schedule) {
        ViolationReport report = verify_schedule(instance, schedule);
        if (!report.ok) throw AuditError("benchmark: schedule failed verification: " + report.message);
        record.makespan_value = makespan(instance, schedule);
        record.ratio_makespan = record.makespan_value / record.lower_bound;
    }
    return record;
}

}  // namespace

std::vector<BenchRecord> run_benchmark(const SuiteConfig& suite, std::ostream& log) {
    struct Task {
        GeneratorConfig config;
        std::string algo;
    };
    std::vector<Task> tasks;
    for (const auto& config : suite.instances)
        for (const auto& algo : suite.algos) tasks.push_back({config, algo});

    std::vector<BenchRecord> records(tasks.size());
    std::atomic<size_t> cursor{0};
    std::mutex log_mutex;

    int threads = suite.threads > 0 ? suite.threads
                                    : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, static_cast<int>(tasks.size()));

    auto worker = [&]() {
        for (;;) {
            size_t t = cursor.fetch_add(1);
            if (t >= tasks.size()) return;
            const Task& task = tasks[t];
            try {
                records[t] = run_one(task.config, task.algo, suite.milp_max_m, suite.rel_tol);
            } catch (const std::exception& e) {
                BenchRecord failed;
                failed.instance_id = task.config.id();
                failed.family = task.config.family;
                failed.n = task.config.n;
                failed.m = task.config.m;
                failed.seed = task.config.seed;
                failed.algo = "error:" + task.algo;
                records[t] = failed;
                std::lock_guard<std::mutex> lock(log_mutex);
                log << "FAIL " << task.config.id() << " " << task.algo << ": " << e.what()
                    << "\n";
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return records;
}

void write_csv(const std::vector<BenchRecord>& records, std::ostream& out) {
    out << bench_csv_header() << "\n";
    for (const auto& r : records) out << to_csv_row(r) << "\n";
}

void print_summary(const std::vector<BenchRecord>& records, std::ostream& out) {
    struct Group {
        int count = 0;
        double sum_load = 0.0, max_load = 0.0;
        double sum_makespan = 0.0, max_makespan = 0.0;
    };
    std::vector<std::pair<std::string, Group>> groups;
    for (const auto& r : records) {
        std::string key = r.family + "/" + r.algo;
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const auto& g) { return g.first == key; });
        if (it == groups.end()) {
            groups.emplace_back(key, Group{});
            it = groups.end() - 1;
        }
        Group& g = it->second;
        ++g.count;
        g.sum_load += r.ratio_load;
        g.max_load = std::max(g.max_load, r.ratio_load);
        g.sum_makespan += r.ratio_makespan;
        g.max_makespan = std::max(g.max_makespan, r.ratio_makespan);
    }
    for (const auto& [key, g] : groups) {
        out << key << ": n=" << g.count << " ratio_load mean=" << g.sum_load / g.count
            << " max=" << g.max_load << " ratio_makespan mean=" << g.sum_makespan / g.count
            << " max=" << g.max_makespan << "\n";
    }
}

// ---------------------------------------------------------------------------
// Gantt

std::vector<GanttRect> gantt_rects(const Instance& instance, const Schedule& schedule) {
    std::vector<GanttRect> rects;
    for (int j = 0; j < instance.num_jobs; ++j) {
        MachineSet s = schedule.assignment.sets[j];
        if (s == 0) continue;
        double t0 = schedule.starts[j];
        double t1 = t0 + instance.time_of(j, s);
        for_each_member(s, [&](int i) { rects.push_back({i, j, t0, t1}); });
    }
    return rects;
}

std::string emit_gantt(const Instance& instance, const Schedule& schedule) {
    const double lane_height = 28.0, lane_gap = 6.0, left = 120.0, top = 20.0;
    const double width = 900.0;

    std::vector<GanttRect> rects = gantt_rects(instance, schedule);
    double horizon = 1e-9;
    for (const auto& r : rects) horizon = std::max(horizon, r.t1);
    double scale = (width - left - 20.0) / horizon;

    std::ostringstream svg;
    double height = top + instance.num_machines * (lane_height + lane_gap) + 20.0;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    for (int i = 0; i < instance.num_machines; ++i) {
        double y = top + i * (lane_height + lane_gap);
        svg << "  <text x=\"8\" y=\"" << y + lane_height * 0.7
            << "\" font-size=\"12\" font-family=\"monospace\">machine " << i << "</text>\n";
        svg << "  <line x1=\"" << left << "\" y1=\"" << y + lane_height << "\" x2=\"" << width - 10
            << "\" y2=\"" << y + lane_height << "\" stroke=\"#ccc\"/>\n";
    }
    for (const auto& r : rects) {
        double x = left + r.t0 * scale;
        double w = std::max(1.0, (r.t1 - r.t0) * scale);
        double y = top + r.machine * (lane_height + lane_gap);
        int hue = (r.job * 47) % 360;  // deterministic per-job color
        svg << "  <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w << "\" height=\""
            << lane_height << "\" fill=\"hsl(" << hue
            << ",70%,60%)\" stroke=\"#333\" stroke-width=\"0.5\"/>\n";
        svg << "  <text x=\"" << x + 3 << "\" y=\"" << y + lane_height * 0.7
            << "\" font-size=\"11\" font-family=\"monospace\">j" << r.job << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace malsched
