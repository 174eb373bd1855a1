#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "malsched/lp.hpp"

#include <cmath>

#include "test_util.hpp"

using namespace malsched;

namespace {

// Vertex-enumeration LP oracle: try every choice of num_vars constraints
// (rows as equalities plus x_i = 0), solve the square system, keep the best
// feasible point. Exponential and proudly so.
struct EnumResult {
    bool feasible = false;
    double objective = 0.0;
};

bool solve_square(std::vector<std::vector<double>> a, std::vector<double> b,
                  std::vector<double>& x) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        double best = 1e-9;
        for (int r = col; r < n; ++r)
            if (std::abs(a[r][col]) > best) {
                best = std::abs(a[r][col]);
                pivot = r;
            }
        if (pivot < 0) return false;
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = a[r][col] / a[col][col];
            for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    x.assign(n, 0.0);
    for (int r = 0; r < n; ++r) x[r] = b[r] / a[r][r];
    return true;
}

EnumResult enumerate_vertices(const LinearProgram& lp) {
    const int n = lp.num_vars();
    struct Constraint {
        std::vector<double> a;
        double b;
        LinearProgram::Sense sense;
    };
    std::vector<Constraint> constraints;
    for (const auto& row : lp.rows) {
        Constraint c{std::vector<double>(n, 0.0), row.rhs, row.sense};
        for (auto [v, coef] : row.terms) c.a[v] += coef;
        constraints.push_back(std::move(c));
    }
    for (int v = 0; v < n; ++v) {
        Constraint c{std::vector<double>(n, 0.0), lp.lower[v], LinearProgram::Sense::GreaterEq};
        c.a[v] = 1.0;
        constraints.push_back(std::move(c));
    }
    const int total = static_cast<int>(constraints.size());

    EnumResult result;
    std::vector<int> pick;
    auto consider = [&](const std::vector<int>& chosen) {
        std::vector<std::vector<double>> a;
        std::vector<double> b;
        for (int c : chosen) {
            a.push_back(constraints[c].a);
            b.push_back(constraints[c].b);
        }
        std::vector<double> x;
        if (!solve_square(a, b, x)) return;
        for (const auto& c : constraints) {
            double lhs = 0.0;
            for (int v = 0; v < n; ++v) lhs += c.a[v] * x[v];
            if (c.sense == LinearProgram::Sense::LessEq && lhs > c.b + 1e-6) return;
            if (c.sense == LinearProgram::Sense::GreaterEq && lhs < c.b - 1e-6) return;
            if (c.sense == LinearProgram::Sense::Equal && std::abs(lhs - c.b) > 1e-6) return;
        }
        double obj = 0.0;
        for (int v = 0; v < n; ++v) obj += lp.objective[v] * x[v];
        if (!result.feasible || (lp.maximize ? obj > result.objective : obj < result.objective)) {
            result.feasible = true;
            result.objective = obj;
        }
    };
    auto dfs = [&](auto&& self, int from) -> void {
        if (static_cast<int>(pick.size()) == n) {
            consider(pick);
            return;
        }
        for (int c = from; c < total; ++c) {
            pick.push_back(c);
            self(self, c + 1);
            pick.pop_back();
        }
    };
    dfs(dfs, 0);
    return result;
}

}  // namespace

TEST_CASE("simplex: one-variable maximum") {
    LinearProgram lp;
    lp.maximize = true;
    int x = lp.add_var(1.0);
    lp.add_row({{x, 1.0}}, LinearProgram::Sense::LessEq, 3.0);
    BasicSolution sol = solve_lp(lp);
    REQUIRE(sol.status == BasicSolution::Status::Optimal);
    CHECK(sol.objective == doctest::Approx(3.0));
    CHECK(sol.values[x] == doctest::Approx(3.0));
    CHECK(sol.row_duals[0] == doctest::Approx(1.0));
}

TEST_CASE("simplex: feasibility vertex has one variable at 1") {
    LinearProgram lp;
    lp.add_var();
    lp.add_var();
    lp.add_row({{0, 1.0}, {1, 1.0}}, LinearProgram::Sense::Equal, 1.0);
    BasicSolution sol = solve_lp(lp);
    REQUIRE(sol.status == BasicSolution::Status::Optimal);
    bool vertex = (std::abs(sol.values[0] - 1.0) < 1e-9 && std::abs(sol.values[1]) < 1e-9) ||
                  (std::abs(sol.values[1] - 1.0) < 1e-9 && std::abs(sol.values[0]) < 1e-9);
    CHECK(vertex);
}

TEST_CASE("simplex: infeasible and unbounded are reported") {
    LinearProgram infeasible;
    infeasible.add_var();
    infeasible.add_row({{0, 1.0}}, LinearProgram::Sense::LessEq, 1.0);
    infeasible.add_row({{0, 1.0}}, LinearProgram::Sense::GreaterEq, 2.0);
    CHECK(solve_lp(infeasible).status == BasicSolution::Status::Infeasible);

    LinearProgram unbounded;
    unbounded.maximize = true;
    unbounded.add_var(1.0);
    unbounded.add_row({{0, -1.0}}, LinearProgram::Sense::LessEq, 1.0);
    CHECK(solve_lp(unbounded).status == BasicSolution::Status::Unbounded);
}

TEST_CASE("simplex: duals on a covering LP") {
    LinearProgram lp;
    int x = lp.add_var(2.0);
    int y = lp.add_var(3.0);
    lp.add_row({{x, 1.0}, {y, 1.0}}, LinearProgram::Sense::GreaterEq, 2.0);
    BasicSolution sol = solve_lp(lp);
    REQUIRE(sol.status == BasicSolution::Status::Optimal);
    CHECK(sol.objective == doctest::Approx(4.0));
    CHECK(sol.row_duals[0] == doctest::Approx(2.0));
}

TEST_CASE("simplex agrees with vertex enumeration on random LPs") {
    int feasible_seen = 0;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Rng rng(seed * 7 + 1);
        int n = rng.uniform_int(2, 5);
        int rows = rng.uniform_int(1, 4);
        LinearProgram lp;
        lp.maximize = rng.bernoulli(0.5);
        for (int v = 0; v < n; ++v) lp.add_var(rng.uniform(-2.0, 2.0));
        // Box to keep everything bounded.
        for (int v = 0; v < n; ++v)
            lp.add_row({{v, 1.0}}, LinearProgram::Sense::LessEq, rng.uniform(1.0, 5.0));
        for (int r = 0; r < rows; ++r) {
            std::vector<std::pair<int, double>> terms;
            for (int v = 0; v < n; ++v) terms.emplace_back(v, rng.uniform(-1.0, 2.0));
            double rhs = rng.uniform(0.5, 4.0);
            auto sense = rng.bernoulli(0.7) ? LinearProgram::Sense::LessEq
                                            : LinearProgram::Sense::GreaterEq;
            lp.add_row(std::move(terms), sense, rhs);
        }
        BasicSolution sol = solve_lp(lp);
        EnumResult expect = enumerate_vertices(lp);
        CAPTURE(seed);
        if (expect.feasible) {
            ++feasible_seen;
            REQUIRE(sol.status == BasicSolution::Status::Optimal);
            CHECK(sol.objective == doctest::Approx(expect.objective).epsilon(1e-6));
            // Basic solutions put at most #rows variables strictly inside.
            int interior = 0;
            for (double v : sol.values)
                if (v > 1e-9) ++interior;
            CHECK(interior <= static_cast<int>(lp.rows.size()));
        } else {
            CHECK(sol.status == BasicSolution::Status::Infeasible);
        }
    }
    CHECK(feasible_seen >= 20);
}

TEST_CASE("support graph: integral solutions give a star forest") {
    std::vector<std::tuple<int, int, double>> entries = {
        {0, 1, 1.0}, {1, 0, 1.0}, {2, 1, 1.0}, {0, 2, 0.0}};
    SupportGraph graph = build_support_graph(entries, 3, 3);
    CHECK(graph.edges.size() == 3);
    CHECK(is_pseudoforest(graph));
    std::vector<int> heads = orient_pseudoforest(graph);
    std::vector<int> in(6, 0);
    for (int h : heads) in[h] += 1;
    for (int v = 0; v < 6; ++v) CHECK(in[v] <= 1);
}

TEST_CASE("support graph: two jobs split over two machines form one cycle") {
    std::vector<std::tuple<int, int, double>> entries = {
        {0, 0, 0.5}, {0, 1, 0.5}, {1, 0, 0.5}, {1, 1, 0.5}};
    SupportGraph graph = build_support_graph(entries, 2, 2);
    CHECK(is_pseudoforest(graph));
    std::vector<int> heads = orient_pseudoforest(graph);
    std::vector<int> in(4, 0);
    for (int h : heads) in[h] += 1;
    for (int v = 0; v < 4; ++v) CHECK(in[v] == 1);  // a pure cycle
}

TEST_CASE("orient_pseudoforest rejects dense components") {
    std::vector<std::tuple<int, int, double>> entries = {
        {0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}, {2, 0, 1.0}, {2, 1, 1.0}};
    SupportGraph graph = build_support_graph(entries, 3, 2);
    CHECK_FALSE(is_pseudoforest(graph));
    CHECK_THROWS_AS(orient_pseudoforest(graph), NotPseudoforestError);
}

TEST_CASE("orient_pseudoforest on random pseudoforests keeps in-degrees <= 1") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        Rng rng(seed + 900);
        // Build a random bipartite pseudoforest: a spanning tree on a random
        // bipartition plus at most one extra edge per component.
        int jobs = rng.uniform_int(2, 10);
        int machines = rng.uniform_int(2, 10);
        std::vector<std::tuple<int, int, double>> entries;
        // Tree: attach node k to a random earlier node of the other side.
        for (int j = 1; j < jobs; ++j) entries.emplace_back(j, rng.uniform_int(0, machines - 1), 1.0);
        for (int i = 0; i < machines; ++i) entries.emplace_back(rng.uniform_int(0, jobs - 1), i, 1.0);
        SupportGraph graph = build_support_graph(entries, jobs, machines);
        if (!is_pseudoforest(graph)) continue;
        std::vector<int> heads = orient_pseudoforest(graph);
        std::vector<int> in(jobs + machines, 0);
        for (int h : heads) in[h] += 1;
        for (int v = 0; v < jobs + machines; ++v) CHECK(in[v] <= 1);
    }
}

TEST_CASE("lst_round keeps integral solutions") {
    std::vector<std::tuple<int, int, double>> entries = {{0, 1, 1.0}, {1, 0, 1.0}};
    std::vector<std::vector<double>> p(2, std::vector<double>(2, 1.0));
    std::vector<int> rounded = lst_round(entries, 2, 2, p, 1.0);
    CHECK(rounded[0] == 1);
    CHECK(rounded[1] == 0);
}

TEST_CASE("lst_round splits the all-half square") {
    std::vector<std::tuple<int, int, double>> entries = {
        {0, 0, 0.5}, {0, 1, 0.5}, {1, 0, 0.5}, {1, 1, 0.5}};
    double C = 1.0;
    std::vector<std::vector<double>> p(2, std::vector<double>(2, C));
    std::vector<int> rounded = lst_round(entries, 2, 2, p, C);
    REQUIRE(rounded[0] >= 0);
    REQUIRE(rounded[1] >= 0);
    CHECK(rounded[0] != rounded[1]);  // one job per machine, load C <= 2C
}

TEST_CASE("lst_round on random feasible assignment LPs") {
    int tested = 0;
    for (std::uint64_t seed = 0; tested < 100 && seed < 400; ++seed) {
        Rng rng(seed + 5000);
        int n = rng.uniform_int(2, 8);
        int m = rng.uniform_int(2, 8);
        std::vector<std::vector<double>> p(m, std::vector<double>(n));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) p[i][j] = rng.uniform(1.0, 100.0);

        // Find the smallest level whose restricted assignment LP is feasible.
        auto restricted = [&](double C)
            -> std::optional<std::pair<std::vector<std::tuple<int, int, double>>, double>> {
            LinearProgram lp;
            std::vector<std::pair<int, int>> vars;
            std::vector<std::vector<std::pair<int, double>>> machine_terms(m);
            for (int j = 0; j < n; ++j) {
                std::vector<std::pair<int, double>> job_terms;
                for (int i = 0; i < m; ++i) {
                    if (p[i][j] > C) continue;
                    int v = lp.add_var();
                    vars.emplace_back(j, i);
                    job_terms.emplace_back(v, 1.0);
                    machine_terms[i].emplace_back(v, p[i][j]);
                }
                if (job_terms.empty()) return std::nullopt;
                lp.add_row(std::move(job_terms), LinearProgram::Sense::Equal, 1.0);
            }
            for (int i = 0; i < m; ++i)
                if (!machine_terms[i].empty())
                    lp.add_row(std::move(machine_terms[i]), LinearProgram::Sense::LessEq, C);
            BasicSolution sol = solve_lp(lp);
            if (sol.status != BasicSolution::Status::Optimal) return std::nullopt;
            std::vector<std::tuple<int, int, double>> entries;
            for (size_t v = 0; v < vars.size(); ++v)
                entries.emplace_back(vars[v].first, vars[v].second, sol.values[v]);
            return std::make_pair(entries, C);
        };
        double hi = 0.0;
        for (int j = 0; j < n; ++j) {
            double best = kInf;
            for (int i = 0; i < m; ++i) best = std::min(best, p[i][j]);
            hi += best;
        }
        std::function<std::optional<std::pair<std::vector<std::tuple<int, int, double>>, double>>(
            double)> proc = restricted;
        auto [C, accepted] = binary_search_decision<
            std::pair<std::vector<std::tuple<int, int, double>>, double>>(proc, hi / (n * m),
                                                                          hi, 1e-4);
        ++tested;

        SupportGraph graph = build_support_graph(accepted.first, n, m);
        CHECK(is_pseudoforest(graph));

        std::vector<int> rounded = lst_round(accepted.first, n, m, p, C);
        std::vector<double> load(m, 0.0);
        for (int j = 0; j < n; ++j) {
            REQUIRE(rounded[j] >= 0);
            load[rounded[j]] += p[rounded[j]][j];
        }
        for (int i = 0; i < m; ++i) CHECK(load[i] <= 2.0 * C * (1 + 1e-6));
    }
    CHECK(tested == 100);
}

TEST_CASE("binary search narrows onto a threshold") {
    std::function<std::optional<int>(double)> proc = [](double C) -> std::optional<int> {
        if (C >= 5.0) return 1;
        return std::nullopt;
    };
    auto [level, sol] = binary_search_decision<int>(proc, 1.0, 16.0, 1e-6);
    CHECK(sol == 1);
    CHECK(level >= 5.0);
    CHECK(level <= 5.0 * (1 + 1e-5));
}

TEST_CASE("binary search with lo == hi returns immediately") {
    int calls = 0;
    std::function<std::optional<int>(double)> proc = [&](double) -> std::optional<int> {
        ++calls;
        return 7;
    };
    auto [level, sol] = binary_search_decision<int>(proc, 3.0, 3.0, 1e-6);
    CHECK(level == doctest::Approx(3.0));
    CHECK(sol == 7);
    CHECK(calls == 1);
}

TEST_CASE("binary search rejects inverted bounds") {
    std::function<std::optional<int>(double)> proc = [](double) -> std::optional<int> {
        return 1;
    };
    CHECK_THROWS_AS((binary_search_decision<int>(proc, 5.0, 1.0, 1e-6)), BoundsInvertedError);
}
