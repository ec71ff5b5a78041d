#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "darkpot/model.hpp"

using namespace darkpot;

namespace {

QuarticPotential make(int a, int b, double d0_bar, double d_bar, double omega_ratio) {
    QuarticPotential p;
    p.a = a;
    p.b = b;
    p.d0_bar = d0_bar;
    p.d_bar = d_bar;
    p.omega_ratio = omega_ratio;
    return p;
}

} // namespace

TEST_CASE("potential value at reference points") {
    // barrier top of the double well
    auto dw = make(-1, 1, 0.0, 123.0, 1e-3);
    CHECK(potential_value(dw, 0.0) == 0.0);

    // harmonic limit: quadratic, minimum at u = 0
    auto h = make(1, 0, 2.0, 10.0, 0.5);
    CHECK(potential_value(h, 2.0) == 0.0);
    CHECK(potential_value(h, 2.0 + 1.0) == doctest::Approx(0.5 * 0.25).epsilon(1e-14));
    CHECK(potential_value(h, 2.0 - 1.0) == doctest::Approx(0.5 * 0.25).epsilon(1e-14));

    // double-well minimum at u = -d
    auto dwp = make(-1, 1, 0.0, 1e6, 1e-3);
    CHECK(potential_value(dwp, -1e6) == doctest::Approx(-0.25e6).epsilon(1e-14));
}

TEST_CASE("taylor coefficients at reference points") {
    auto dw = make(-1, 1, 0.0, 1e6, 1e-3);
    auto c0 = taylor_coefficients(dw, 0.0);
    CHECK(c0.alpha2 == -1.0);
    CHECK(c0.alpha3 == 0.0);

    auto c1 = taylor_coefficients(dw, 1e6); // u = d
    CHECK(c1.alpha2 == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(c1.alpha3 == doctest::Approx(3e-6).epsilon(1e-14));

    auto h = make(1, 0, 5.0, 10.0, 1.0);
    auto ch = taylor_coefficients(h, -3.7);
    CHECK(ch.alpha2 == 1.0);
    CHECK(ch.alpha3 == 0.0);
}

TEST_CASE("taylor coefficients match finite differences of the potential") {
    // alpha2 from the second central difference at 1e-6 step (points near a
    // zero of V keep the cancellation error below the 1e-4 bar).  The third
    // difference cannot survive a 1e-6 step in double precision (roundoff
    // scales as eps/h^3), so alpha3 uses a wider stencil; for a quartic the
    // 4-point formula is exact at any step.
    auto pot = make(-1, 1, 0.0, 0.5, 1.0);
    const double h2 = 1e-6;
    const double h3 = 1e-2;
    const double w2 = pot.omega_ratio * pot.omega_ratio;
    for (double x : {std::sqrt(2.0) * 0.5, -std::sqrt(2.0) * 0.5, 0.62}) {
        auto tc = taylor_coefficients(pot, x);
        const double vpp = (potential_value(pot, x + h2) - 2.0 * potential_value(pot, x) +
                            potential_value(pot, x - h2)) /
                           (h2 * h2);
        CHECK(vpp == doctest::Approx(w2 * tc.alpha2).epsilon(1e-4));
        const double vppp =
            (potential_value(pot, x + 2 * h3) - 2.0 * potential_value(pot, x + h3) +
             2.0 * potential_value(pot, x - h3) - potential_value(pot, x - 2 * h3)) /
            (2.0 * h3 * h3 * h3);
        CHECK(vppp == doctest::Approx(2.0 * w2 * tc.alpha3).epsilon(1e-4));
    }
}

TEST_CASE("dephasing rate reference values and zeros") {
    NoiseModel noise;
    noise.s1 = 0.3;
    noise.s2 = 0.7;
    noise.l_bar = 4.0;

    // IDW at its minimum: the slope term vanishes
    auto idw = make(1, -1, 0.0, 8.0, 0.2);
    NoiseModel amp_only = noise;
    amp_only.s1 = 0.0;
    CHECK(dephasing_rate(idw, amp_only, 0.0) == 0.0);

    // DW at the inflection point u = d/sqrt(3): the curvature term vanishes
    auto dw = make(-1, 1, 0.0, 8.0, 0.2);
    NoiseModel pos_only = noise;
    pos_only.s2 = 0.0;
    const double u_inf = 8.0 / std::sqrt(3.0);
    CHECK(dephasing_rate(dw, pos_only, u_inf) == doctest::Approx(0.0).epsilon(1e-25));

    // curvature-only reference number
    auto h = make(1, 0, 0.0, 1e6, 1e-3);
    NoiseModel ref;
    ref.s1 = 1e-9;
    ref.l_bar = 1e6;
    CHECK(dephasing_rate(h, ref, 0.0) == doctest::Approx(0.5 * M_PI * 1e-9).epsilon(1e-12));
    CHECK(0.5 * M_PI * 1e-9 == doctest::Approx(1.571e-9).epsilon(1e-3));
}

TEST_CASE("dephasing rate is nonnegative, zero without noise, reflection even") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    NoiseModel off;
    off.l_bar = 2.0;
    for (int trial = 0; trial < 200; ++trial) {
        auto pot = make((trial % 3) - 1, ((trial / 3) % 3) - 1, 0.0, 1.5, 0.8);
        NoiseModel noise;
        noise.s1 = 0.5 * (1 + (trial % 5));
        noise.s2 = 0.25 * (1 + (trial % 7));
        noise.l_bar = 2.0;
        const double u = unif(rng);
        const double g = dephasing_rate(pot, noise, u);
        CHECK(g >= 0.0);
        CHECK(dephasing_rate(pot, off, u) == 0.0);
        CHECK(g == doctest::Approx(dephasing_rate(pot, noise, -u)).epsilon(1e-12));
    }
}

TEST_CASE("validation rejects bad parameters") {
    SystemParams p;
    p.omega_ratio = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);

    QuarticPotential q = make(0, 1, 1.0, 2.0, 0.1);
    CHECK_NOTHROW(q.validate(false));
    CHECK_THROWS_AS(q.validate(true), std::invalid_argument); // candidates need |a| = 1

    NoiseModel n;
    n.s1 = -1.0;
    CHECK_THROWS_AS(n.validate(), std::invalid_argument);
}
