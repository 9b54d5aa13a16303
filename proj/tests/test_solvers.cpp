#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "bellbound/bellbound.hpp"
#include "oracle_lp.hpp"
#include "test_support.hpp"

namespace bb = bellbound;
namespace ts = test_support;

namespace {

bb::LpProblem to_production(const oracle_lp::Problem& p) {
    bb::LpProblem lp;
    lp.rows = p.rows;
    lp.cols = p.cols;
    lp.a = p.a;
    lp.b = p.b;
    lp.c = p.c;
    return lp;
}

// Random standard-form LP that is feasible by construction: b = A x0 for a
// nonnegative x0.
oracle_lp::Problem random_feasible_lp(std::mt19937_64& rng, std::size_t m,
                                      std::size_t n) {
    oracle_lp::Problem p;
    p.rows = m;
    p.cols = n;
    p.a.resize(m * n);
    for (double& v : p.a) v = std::round(8.0 * (ts::uniform01(rng) - 0.5)) / 2.0;
    std::vector<double> x0(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        if (ts::uniform01(rng) < 0.6) x0[j] = ts::uniform01(rng) * 2.0;
    }
    p.b.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) p.b[i] += p.a[i * n + j] * x0[j];
    }
    p.c.resize(n);
    // Nonnegative costs keep the minimum bounded below by zero.
    for (double& v : p.c) v = ts::uniform01(rng);
    return p;
}

}  // namespace

TEST_CASE("simplex solves a textbook problem exactly") {
    // min -3x - 5y  s.t.  x + s1 = 4, 2y + s2 = 12, 3x + 2y + s3 = 18.
    bb::LpProblem lp;
    lp.rows = 3;
    lp.cols = 5;
    lp.a = {1, 0, 1, 0, 0,  //
            0, 2, 0, 1, 0,  //
            3, 2, 0, 0, 1};
    lp.b = {4, 12, 18};
    lp.c = {-3, -5, 0, 0, 0};
    bb::LpResult r = bb::solve_lp(lp);
    REQUIRE(r.status == bb::LpResult::Status::optimal);
    CHECK(r.objective == Catch::Approx(-36.0).margin(1e-9));
    CHECK(r.x[0] == Catch::Approx(2.0).margin(1e-9));
    CHECK(r.x[1] == Catch::Approx(6.0).margin(1e-9));
    CHECK(r.dual_objective == Catch::Approx(-36.0).margin(1e-9));
    CHECK(r.primal_residual <= 1e-9);
    CHECK(r.dual_residual <= 1e-9);
}

TEST_CASE("simplex detects infeasibility") {
    // x1 + x2 = 1 and x1 + x2 = 2 cannot both hold.
    bb::LpProblem lp;
    lp.rows = 2;
    lp.cols = 2;
    lp.a = {1, 1, 1, 1};
    lp.b = {1, 2};
    lp.c = {1, 0};
    CHECK(bb::solve_lp(lp).status == bb::LpResult::Status::infeasible);
}

TEST_CASE("simplex detects unboundedness") {
    // min -x1 with x1 - x2 = 0 lets x1 = x2 grow without bound.
    bb::LpProblem lp;
    lp.rows = 1;
    lp.cols = 2;
    lp.a = {1, -1};
    lp.b = {0};
    lp.c = {-1, 0};
    CHECK(bb::solve_lp(lp).status == bb::LpResult::Status::unbounded);
}

TEST_CASE("simplex handles degenerate and redundant rows") {
    // Duplicate constraint rows; optimum at x = (0, 1), objective 1.
    bb::LpProblem lp;
    lp.rows = 2;
    lp.cols = 2;
    lp.a = {1, 1, 1, 1};
    lp.b = {1, 1};
    lp.c = {2, 1};
    bb::LpResult r = bb::solve_lp(lp);
    REQUIRE(r.status == bb::LpResult::Status::optimal);
    CHECK(r.objective == Catch::Approx(1.0).margin(1e-9));
    CHECK(r.primal_residual <= 1e-9);
}

TEST_CASE("independent tableau oracle agrees on the textbook cases") {
    oracle_lp::Problem p;
    p.rows = 3;
    p.cols = 5;
    p.a = {1, 0, 1, 0, 0, 0, 2, 0, 1, 0, 3, 2, 0, 0, 1};
    p.b = {4, 12, 18};
    p.c = {-3, -5, 0, 0, 0};
    oracle_lp::Result r = oracle_lp::solve(p);
    REQUIRE(r.feasible);
    REQUIRE(r.bounded);
    CHECK(r.objective == Catch::Approx(-36.0).margin(1e-9));

    oracle_lp::Problem bad;
    bad.rows = 2;
    bad.cols = 2;
    bad.a = {1, 1, 1, 1};
    bad.b = {1, 2};
    bad.c = {1, 0};
    CHECK_FALSE(oracle_lp::solve(bad).feasible);

    oracle_lp::Problem unb;
    unb.rows = 1;
    unb.cols = 2;
    unb.a = {1, -1};
    unb.b = {0};
    unb.c = {-1, 0};
    oracle_lp::Result u = oracle_lp::solve(unb);
    REQUIRE(u.feasible);
    CHECK_FALSE(u.bounded);
}

TEST_CASE("production simplex matches the oracle on random feasible programs") {
    std::mt19937_64 rng(2024);
    int solved = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t m = 2 + trial % 4;        // 2..5 rows
        const std::size_t n = m + 1 + trial % 5;    // a few more columns
        oracle_lp::Problem p = random_feasible_lp(rng, m, n);
        oracle_lp::Result expect = oracle_lp::solve(p);
        REQUIRE(expect.feasible);
        REQUIRE(expect.bounded);
        bb::LpResult got = bb::solve_lp(to_production(p));
        REQUIRE(got.status == bb::LpResult::Status::optimal);
        CHECK(got.objective == Catch::Approx(expect.objective).margin(1e-7));
        CHECK(got.primal_residual <= 1e-8);
        CHECK(got.dual_residual <= 1e-8);
        CHECK(std::abs(got.objective - got.dual_objective) <= 1e-7);
        ++solved;
    }
    CHECK(solved == 60);
}

TEST_CASE("frank-wolfe minimizes a convex quadratic over the local polytope") {
    bb::VertexSet vertices(bb::chsh_scenario());
    const bb::Scenario& s = vertices.scenario();
    const std::vector<double> target = bb::tsirelson_behavior().flat();
    const std::size_t dim = s.flat_dimension();

    auto objective = [&](const std::vector<double>& q) {
        double acc = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double d = q[i] - target[i];
            acc += d * d;
        }
        return 0.5 * acc;
    };
    auto gradient = [&](const std::vector<double>& q, std::vector<double>& g) {
        for (std::size_t i = 0; i < dim; ++i) g[i] = q[i] - target[i];
    };

    // 1e-8 is the practical floor here: the line search stalls at float
    // resolution once the linearization gap reaches a few 1e-9.
    bb::FwOptions opt;
    opt.tol = 1e-8;
    bb::FwResult r = bb::frank_wolfe_minimize(vertices, objective, gradient, {}, opt);
    REQUIRE(r.converged);
    CHECK(r.gap <= 1e-8);

    // Euclidean projection of the quantum-optimal table onto the local set:
    // clip each correlator to 1/2. Squared distance per setting is
    // 4 * ((e - 1/2) / 4)^2 with e = 1/sqrt(2), over 4 settings, halved.
    const double e = 1.0 / std::sqrt(2.0);
    const double expected = 0.5 * 16.0 * std::pow((e - 0.5) / 4.0, 2.0);
    CHECK(r.primal == Catch::Approx(expected).margin(1e-7));
}

TEST_CASE("frank-wolfe is monotone and feasible on a convex objective") {
    bb::VertexSet vertices(bb::chsh_scenario());
    const std::size_t dim = vertices.scenario().flat_dimension();
    const std::vector<double> target = bb::tsirelson_behavior().flat();
    auto objective = [&](const std::vector<double>& q) {
        double acc = 0.0;
        for (std::size_t i = 0; i < dim; ++i) acc += (q[i] - target[i]) * (q[i] - target[i]);
        return acc;
    };
    auto gradient = [&](const std::vector<double>& q, std::vector<double>& g) {
        for (std::size_t i = 0; i < dim; ++i) g[i] = 2.0 * (q[i] - target[i]);
    };
    bb::FwResult r = bb::frank_wolfe_minimize(vertices, objective, gradient);
    double total = 0.0;
    for (double w : r.weights) {
        CHECK(w >= 0.0);
        total += w;
    }
    CHECK(total == Catch::Approx(1.0).margin(1e-9));
    CHECK(r.iterations > 0);

    // Restart from the solution: already optimal, so it stops immediately.
    bb::FwResult again =
        bb::frank_wolfe_minimize(vertices, objective, gradient, r.weights);
    CHECK(again.converged);
    CHECK(again.primal <= r.primal + 1e-12);
}

TEST_CASE("frank-wolfe rejects bad options and start points") {
    bb::VertexSet vertices(bb::chsh_scenario());
    auto objective = [](const std::vector<double>&) { return 0.0; };
    auto gradient = [](const std::vector<double>&, std::vector<double>& g) {
        std::fill(g.begin(), g.end(), 0.0);
    };
    bb::FwOptions bad;
    bad.tol = 0.0;
    CHECK_THROWS_AS(
        bb::frank_wolfe_minimize(vertices, objective, gradient, {}, bad),
        bb::InvalidInputError);
    CHECK_THROWS_AS(bb::frank_wolfe_minimize(vertices, objective, gradient,
                                             std::vector<double>(3, 1.0 / 3.0)),
                    bb::InvalidInputError);
}
