#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "malsched/baselines.hpp"
#include "malsched/json_io.hpp"
#include "malsched/matroid_scheduler.hpp"
#include "malsched/submodular.hpp"
#include "malsched/transform.hpp"

using namespace malsched;

namespace {

constexpr int kExitVerifyFailure = 2;

nlohmann::ordered_json config_meta(const GeneratorConfig& config) {
    return {{"family", config.family}, {"n", config.n},       {"m", config.m},
            {"seed", config.seed},     {"rng", "mt19937_64"}, {"dense", config.matching_dense}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Solvers and benchmarks for scheduling jobs that run in unison "
                 "on machine sets with set-function speeds"};
    app.require_subcommand(1);

    // --- gen -----------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "Generate a random instance");
    GeneratorConfig config;
    std::string gen_out;
    gen->add_option("--family", config.family,
                    "coverage | budget_additive | matroid_matching | matroid_rank | clique_gap")
        ->required();
    gen->add_option("--n", config.n, "number of jobs")->required();
    gen->add_option("--m", config.m, "number of machines");
    gen->add_option("--seed", config.seed, "random seed");
    gen->add_flag("--dense", config.matching_dense, "matroid_matching: use k = b = m + 1");
    gen->add_option("--out", gen_out, "output path (stdout when omitted)");

    // --- exact ----------------------------------------------------------
    auto* exact = app.add_subcommand("exact", "Exact minimum-load assignment");
    std::string exact_instance, exact_out;
    long exact_nodes = 50'000'000;
    exact->add_option("--instance", exact_instance)->required();
    exact->add_option("--out", exact_out, "write the optimal assignment JSON here");
    exact->add_option("--max-nodes", exact_nodes);

    // --- lowerbound -----------------------------------------------------
    auto* lower = app.add_subcommand("lowerbound", "LP lower bound on the optimal load");
    std::string lower_instance;
    lower->add_option("--instance", lower_instance)->required();

    // --- solve ----------------------------------------------------------
    auto* solve = app.add_subcommand("solve", "Approximation algorithms");
    std::string solve_algo, solve_instance, solve_out;
    double solve_tol = 1e-6;
    bool solve_identical_flag = false;
    solve->add_option("--algo", solve_algo, "matroid | submodular")->required();
    solve->add_option("--instance", solve_instance)->required();
    solve->add_option("--out", solve_out, "write the schedule JSON here");
    solve->add_option("--tol", solve_tol, "binary search relative tolerance");
    solve->add_flag("--identical", solve_identical_flag,
                    "jobs share one oracle: single-phase replication");

    // --- transform ------------------------------------------------------
    auto* transform = app.add_subcommand(
        "transform", "Rework an assignment into a well-structured one");
    std::string tr_instance, tr_assignment, tr_out, tr_mode = "submodular";
    transform->add_option("--instance", tr_instance)->required();
    transform->add_option("--assignment", tr_assignment)->required();
    transform->add_option("--out", tr_out, "write the transformed assignment here");
    transform->add_option("--mode", tr_mode, "submodular | xos | subadditive");

    // --- bench ----------------------------------------------------------
    auto* bench = app.add_subcommand("bench", "Run a benchmark suite");
    std::string bench_suite, bench_csv;
    bench->add_option("--suite", bench_suite, "suite JSON")->required();
    bench->add_option("--csv", bench_csv, "CSV output path")->required();

    // --- gantt ----------------------------------------------------------
    auto* gantt = app.add_subcommand("gantt", "Render a schedule as SVG");
    std::string gantt_instance, gantt_schedule, gantt_out;
    gantt->add_option("--instance", gantt_instance)->required();
    gantt->add_option("--schedule", gantt_schedule)->required();
    gantt->add_option("--out", gantt_out)->required();

    // --- verify ---------------------------------------------------------
    auto* verify = app.add_subcommand("verify", "Check a schedule for conflicts");
    std::string verify_instance, verify_schedule_path;
    verify->add_option("--instance", verify_instance)->required();
    verify->add_option("--schedule", verify_schedule_path)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            Instance instance = generate(config);
            nlohmann::ordered_json j = instance_to_json(instance);
            j["meta"] = config_meta(config);
            if (gen_out.empty())
                std::cout << j.dump(2) << "\n";
            else
                save_json(j, gen_out);
            return 0;
        }
        if (exact->parsed()) {
            Instance instance = load_instance(exact_instance);
            MilpLimits limits;
            limits.max_nodes = exact_nodes;
            MilpResult result = exact_milp(instance, limits);
            nlohmann::ordered_json report = {
                {"value", result.value},
                {"status", result.status == MilpResult::Status::Optimal ? "optimal" : "limit"},
                {"best_bound", result.best_bound},
                {"nodes", result.nodes}};
            std::cout << report.dump() << "\n";
            if (!exact_out.empty()) save_json(assignment_to_json(result.assignment), exact_out);
            return 0;
        }
        if (lower->parsed()) {
            Instance instance = load_instance(lower_instance);
            nlohmann::ordered_json report = {{"lower_bound", lp_lower_bound(instance)}};
            std::cout << report.dump() << "\n";
            return 0;
        }
        if (solve->parsed()) {
            Instance instance = load_instance(solve_instance);
            Schedule schedule;
            double level = 0.0;
            if (solve_identical_flag) {
                IdenticalSolution sol = solve_identical(instance, solve_tol);
                schedule = std::move(sol.schedule);
                level = sol.level;
            } else if (solve_algo == "matroid") {
                MatroidSolution sol = solve_matroid(instance, solve_tol);
                schedule = std::move(sol.schedule);
                level = sol.level;
            } else if (solve_algo == "submodular") {
                SubmodularSolution sol = solve_submodular(instance, solve_tol);
                schedule = std::move(sol.schedule);
                level = sol.level;
            } else {
                std::cerr << "unknown --algo " << solve_algo << "\n";
                return 1;
            }
            ViolationReport report = verify_schedule(instance, schedule);
            if (!report.ok) {
                std::cerr << "verification failed: " << report.message << "\n";
                return kExitVerifyFailure;
            }
            nlohmann::ordered_json summary = {
                {"algo", solve_algo},
                {"level", level},
                {"load", machine_loads(instance, schedule.assignment).max_load},
                {"makespan", makespan(instance, schedule)}};
            std::cout << summary.dump() << "\n";
            if (!solve_out.empty()) save_json(schedule_to_json(schedule), solve_out);
            return 0;
        }
        if (transform->parsed()) {
            Instance instance = load_instance(tr_instance);
            Assignment assignment = assignment_from_json(load_json(tr_assignment));
            std::pair<Assignment, TransformReport> result;
            if (tr_mode == "submodular")
                result = transform_assignment(instance, assignment, ShareMode::Greedy);
            else if (tr_mode == "xos")
                result = transform_assignment(instance, assignment, ShareMode::CoverLp);
            else if (tr_mode == "subadditive")
                result = transform_subadditive(instance, assignment);
            else {
                std::cerr << "unknown --mode " << tr_mode << "\n";
                return 1;
            }
            nlohmann::ordered_json report = {
                {"input_load", result.second.input_load},
                {"output_load", result.second.output_load},
                {"ratio", result.second.ratio},
                {"well_structured", is_well_structured(result.first)}};
            std::cout << report.dump() << "\n";
            if (!tr_out.empty()) save_json(assignment_to_json(result.first), tr_out);
            return 0;
        }
        if (bench->parsed()) {
            SuiteConfig suite = suite_from_json(load_json(bench_suite));
            std::vector<BenchRecord> records = run_benchmark(suite, std::cerr);
            std::ofstream csv(bench_csv);
            if (!csv) throw std::runtime_error("cannot write " + bench_csv);
            write_csv(records, csv);
            print_summary(records, std::cout);
            for (const auto& r : records)
                if (r.algo.rfind("error:", 0) == 0) return kExitVerifyFailure;
            return 0;
        }
        if (gantt->parsed()) {
            Instance instance = load_instance(gantt_instance);
            Schedule schedule = schedule_from_json(load_json(gantt_schedule));
            ViolationReport report = verify_schedule(instance, schedule);
            if (!report.ok) {
                std::cerr << "verification failed: " << report.message << "\n";
                return kExitVerifyFailure;
            }
            std::ofstream out(gantt_out);
            if (!out) throw std::runtime_error("cannot write " + gantt_out);
            out << emit_gantt(instance, schedule);
            return 0;
        }
        if (verify->parsed()) {
            Instance instance = load_instance(verify_instance);
            Schedule schedule = schedule_from_json(load_json(verify_schedule_path));
            ViolationReport report = verify_schedule(instance, schedule);
            if (!report.ok) {
                std::cerr << "verification failed: " << report.message << "\n";
                return kExitVerifyFailure;
            }
            nlohmann::ordered_json summary = {
                {"ok", true},
                {"load", machine_loads(instance, schedule.assignment).max_load},
                {"makespan", makespan(instance, schedule)}};
            std::cout << summary.dump() << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
