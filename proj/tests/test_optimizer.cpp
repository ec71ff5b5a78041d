#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "darkpot/optimizer.hpp"

using namespace darkpot;

namespace {

OptimizationProblem base_problem(MeritKind kind) {
    OptimizationProblem p;
    p.merit_kind = kind;
    p.params = SystemParams{};
    p.noise.l_bar = p.params.l_bar;
    p.seeds = 8;
    p.rng_seed = 99;
    return p;
}

} // namespace

TEST_CASE("evaluate_candidate: feasible DW carries a merit, runaway is infeasible") {
    auto problem = base_problem(MeritKind::coherence_length);
    const auto dw = QuarticPotential::candidate(-1, 1, 0.5, problem.params);
    auto ev = evaluate_candidate(dw, problem);
    CHECK(ev.feasible);
    CHECK(ev.merit > std::sqrt(8.0)); // expansion beats the initial state
    CHECK(ev.argmax_tau > 0.0);
    CHECK(ev.argmax_tau <= ev.period_bar);

    const auto runaway = QuarticPotential::candidate(-1, -1, 0.5, problem.params);
    auto bad = evaluate_candidate(runaway, problem);
    CHECK(!bad.feasible);
    CHECK(std::isinf(bad.merit));

    // degenerate equilibrium start surfaces as a diagnostic, not an abort
    const auto at_min = QuarticPotential::candidate(-1, 1, 1.0, problem.params);
    auto deg = evaluate_candidate(at_min, problem);
    CHECK(!deg.feasible);
    CHECK(deg.diagnostic.find("degenerate") != std::string::npos);
}

TEST_CASE("harmonic control: stationary ground state has flat merit sqrt(8)") {
    auto problem = base_problem(MeritKind::coherence_length);
    // omega = Omega keeps the prepared state stationary
    SystemParams params;
    params.omega_ratio = 1.0;
    params.t_gas_bar = 100.0;
    problem.params = params;
    QuarticPotential h;
    h.a = 1;
    h.b = 0;
    h.d_bar = params.d_bar;
    h.omega_ratio = 1.0;
    h.d0_bar = 0.01 * params.d_bar;
    auto ev = evaluate_candidate(h, problem);
    CHECK(ev.feasible);
    CHECK(ev.merit == doctest::Approx(std::sqrt(8.0)).epsilon(1e-6));
}

TEST_CASE("optimize under strong amplitude noise lands on the IDW at the lower bound") {
    auto problem = base_problem(MeritKind::coherence_length);
    problem.noise.s2 = 1e-7;
    problem.seeds = 8;
    auto res = optimize(problem);
    CHECK(res.best.a == 1);
    CHECK(res.best.b == -1);
    CHECK(res.best.d0_bar / res.best.d_bar == doctest::Approx(problem.d0_lo).epsilon(0.05));
    CHECK(res.feasibility.feasible());
    CHECK(res.evaluations > 0);

    // the returned best is a local maximum along d0
    const double d0 = res.best.d0_bar / res.best.d_bar;
    for (double delta : {-problem.local_tol, problem.local_tol}) {
        const double probe = d0 + delta;
        if (probe < problem.d0_lo || probe > problem.d0_hi) continue;
        auto ev = evaluate_candidate(
            QuarticPotential::candidate(res.best.a, res.best.b, probe, problem.params), problem);
        if (ev.feasible) CHECK(ev.merit <= res.merit_value + 1e-9);
    }
}

TEST_CASE("optimize is reproducible for a fixed seed") {
    auto problem = base_problem(MeritKind::coherence_length);
    problem.noise.s2 = 1e-7;
    problem.seeds = 6;
    auto r1 = optimize(problem);
    auto r2 = optimize(problem);
    CHECK(r1.best.a == r2.best.a);
    CHECK(r1.best.b == r2.best.b);
    CHECK(r1.best.d0_bar == r2.best.d0_bar);      // bitwise
    CHECK(r1.merit_value == r2.merit_value);      // bitwise
    CHECK(r1.evaluations == r2.evaluations);
    REQUIRE(r1.per_sign_best.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(r1.per_sign_best[i].feasible == r2.per_sign_best[i].feasible);
        CHECK(r1.per_sign_best[i].merit == r2.per_sign_best[i].merit);
    }
}

TEST_CASE("impossible period budget reports an empty feasible set") {
    auto problem = base_problem(MeritKind::coherence_length);
    problem.params.t_gas_bar = 1.0; // nothing closes an orbit this fast
    problem.seeds = 4;
    CHECK_THROWS_WITH_AS(optimize(problem), doctest::Contains("no feasible candidate"),
                         std::runtime_error);
}

TEST_CASE("merit kind names round-trip") {
    CHECK(merit_kind_from_name("coherence_length") == MeritKind::coherence_length);
    CHECK(merit_kind_from_name("coherent_cubicity") == MeritKind::coherent_cubicity);
    CHECK_THROWS_AS(merit_kind_from_name("nope"), std::invalid_argument);
    CHECK(std::string(merit_kind_name(MeritKind::coherent_cubicity)) == "coherent_cubicity");
}
