#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "darkpot/config.hpp"
#include "darkpot/csv.hpp"
#include "darkpot/oracle.hpp"

using namespace darkpot;
using nlohmann::json;

TEST_CASE("defaults reflect the documented reference configuration") {
    RunConfig cfg;
    CHECK(cfg.system.omega_ratio == 1e-3);
    CHECK(cfg.system.d_bar == 1e6);
    CHECK(cfg.system.l_bar == 1e6);
    CHECK(cfg.system.alpha_bound == 5.0);
    CHECK(cfg.system.t_gas_bar == doctest::Approx(2.0 * M_PI * 1500.0));
    CHECK(cfg.d0_lo == 0.005);
    CHECK(cfg.d0_hi == doctest::Approx(std::sqrt(2.0)));
    CHECK(cfg.seeds == 2000);
    CHECK(cfg.local_tol == 1e-6);
    CHECK(cfg.max_iters == 1000);
}

TEST_CASE("round trip through json and overrides") {
    json doc = RunConfig::default_json();
    apply_override(doc, "noise.s1=1e-8");
    apply_override(doc, "optimize.merit=coherent_cubicity");
    apply_override(doc, "optimize.seeds=40");
    apply_override(doc, "output_dir=scratch");
    auto cfg = RunConfig::from_json(doc);
    CHECK(cfg.noise.s1 == 1e-8);
    CHECK(cfg.merit == MeritKind::coherent_cubicity);
    CHECK(cfg.seeds == 40);
    CHECK(cfg.output_dir == "scratch");
    // noise length scale mirrors the system scale
    CHECK(cfg.noise.l_bar == cfg.system.l_bar);
}

TEST_CASE("unknown keys are rejected, including nested ones") {
    json doc = RunConfig::default_json();
    doc["systme"] = json::object();
    CHECK_THROWS_WITH_AS(RunConfig::from_json(doc), doctest::Contains("unknown key"),
                         std::invalid_argument);

    json doc2 = RunConfig::default_json();
    doc2["system"]["d_barr"] = 1.0;
    CHECK_THROWS_WITH_AS(RunConfig::from_json(doc2), doctest::Contains("unknown key"),
                         std::invalid_argument);

    json doc3 = RunConfig::default_json();
    CHECK_THROWS_AS(apply_override(doc3, "system.nope=1"), std::invalid_argument);
    CHECK_THROWS_AS(apply_override(doc3, "no-equals-sign"), std::invalid_argument);
}

TEST_CASE("invalid values fail validation") {
    json doc = RunConfig::default_json();
    apply_override(doc, "system.omega_ratio=-1");
    CHECK_THROWS_AS(RunConfig::from_json(doc), std::invalid_argument);

    json doc2 = RunConfig::default_json();
    apply_override(doc2, "optimize.d0_range=[0.1]");
    CHECK_THROWS_AS(RunConfig::from_json(doc2), std::invalid_argument);
}

TEST_CASE("optimization problem mirrors the config") {
    json doc = RunConfig::default_json();
    apply_override(doc, "noise.s2=3e-9");
    apply_override(doc, "optimize.d0_range=[0.01,0.5]");
    apply_override(doc, "rng_seed=77");
    auto p = RunConfig::from_json(doc).optimization_problem();
    CHECK(p.noise.s2 == 3e-9);
    CHECK(p.d0_lo == 0.01);
    CHECK(p.d0_hi == 0.5);
    CHECK(p.rng_seed == 77);
}

TEST_CASE("doubles survive the 17-digit csv format") {
    for (double v : {1.0 / 3.0, M_PI, 2.0 * M_PI * 1500.0, 1e-300, -7.25, 0.0}) {
        const std::string s = format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("oracle suite passes clean and catches an injected prefactor error") {
    auto clean = run_oracle_suite();
    CHECK(clean.size() >= 10);
    for (const auto& c : clean) {
        INFO(c.name, " err=", c.error, " tol=", c.tolerance);
        CHECK(c.pass);
    }

    OracleTweaks broken;
    broken.dephasing_prefactor_scale = 1.01;
    auto tainted = run_oracle_suite(broken);
    bool dephasing_failed = false;
    for (const auto& c : tainted)
        if (c.name == "dephasing prefactor") dephasing_failed = !c.pass;
    CHECK(dephasing_failed);

    OracleTweaks tight;
    tight.tolerance_scale = 1e-14 / 1e-6; // push float-limited checks past machine precision
    auto strict = run_oracle_suite(tight);
    bool any_failed = false;
    for (const auto& c : strict) any_failed = any_failed || !c.pass;
    CHECK(any_failed); // documented: double precision cannot meet 1e-14 everywhere
}
