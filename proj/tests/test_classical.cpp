#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "darkpot/classical.hpp"
#include "darkpot/csv.hpp"

using namespace darkpot;

namespace {

SystemParams paper_params() {
    return SystemParams{}; // omega_ratio 1e-3, d_bar 1e6, alpha_b 5, t_gas 2pi*1500
}

} // namespace

TEST_CASE("harmonic orbit: analytic trajectory and isochronous period") {
    SystemParams params = paper_params();
    QuarticPotential h;
    h.a = 1;
    h.b = 0;
    h.d_bar = params.d_bar;
    h.omega_ratio = params.omega_ratio;
    h.d0_bar = 0.03 * params.d_bar;

    auto traj = integrate_trajectory(h, params);
    REQUIRE(traj.closed);
    const double lam = params.omega_ratio;
    CHECK(*traj.period_bar == doctest::Approx(2.0 * M_PI / lam).epsilon(1e-9));

    // u(tau) = -d0 cos(lam tau)
    for (double tau : {100.0, 1000.0, 2500.0}) {
        const double u = traj.x_at(tau) - h.d0_bar;
        CHECK(u == doctest::Approx(-h.d0_bar * std::cos(lam * tau)).epsilon(1e-8));
    }
    CHECK(period_oracle(h, params) == doctest::Approx(2.0 * M_PI / lam).epsilon(1e-7));
}

TEST_CASE("pure quartic period scales inversely with amplitude") {
    SystemParams params = paper_params();
    QuarticPotential q;
    q.a = 0;
    q.b = 1;
    q.d_bar = params.d_bar;
    q.omega_ratio = params.omega_ratio;

    q.d0_bar = 0.2 * params.d_bar;
    const double t1 = period_oracle(q, params);
    q.d0_bar = 0.4 * params.d_bar;
    const double t2 = period_oracle(q, params);
    CHECK(t1 / t2 == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("double-well period agrees with the quadrature oracle") {
    SystemParams params = paper_params();
    const auto dw = QuarticPotential::candidate(-1, 1, 0.05, params);
    auto traj = integrate_trajectory(dw, params);
    REQUIRE(traj.closed);
    CHECK(*traj.period_bar == doctest::Approx(period_oracle(dw, params)).epsilon(1e-6));
}

TEST_CASE("randomized DW/IDW candidates: oracle agreement to 1e-6") {
    SystemParams params = paper_params();
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> dw_d0(0.02, 1.2);
    std::uniform_real_distribution<double> idw_d0(0.02, 0.9);
    for (int k = 0; k < 12; ++k) {
        const bool dw = k % 2 == 0;
        const double d0 = dw ? dw_d0(rng) : idw_d0(rng);
        const auto pot = QuarticPotential::candidate(dw ? -1 : 1, dw ? 1 : -1, d0, params);
        auto traj = integrate_trajectory(pot, params);
        REQUIRE(traj.closed);
        CHECK(*traj.period_bar == doctest::Approx(period_oracle(pot, params)).epsilon(1e-6));
    }
}

TEST_CASE("energy conservation and time-reversal symmetry") {
    SystemParams params = paper_params();
    const double rel_tol = 1e-10;
    const auto pot = QuarticPotential::candidate(-1, 1, 0.3, params);
    auto traj = integrate_trajectory(pot, params, rel_tol);
    REQUIRE(traj.closed);

    const double e0 = traj.energy_bar;
    double drift = 0.0;
    for (const auto& s : traj.samples) {
        const double e = 0.5 * s.p_bar * s.p_bar + potential_value(pot, s.x_bar);
        drift = std::max(drift, std::fabs(e - e0) / std::max(std::fabs(e0), 1e-12));
    }
    CHECK(drift < 10.0 * rel_tol);

    // forward half a period, flip momentum, forward half a period -> start
    const double half = 0.5 * *traj.period_bar;
    const double x_half = traj.x_at(half);
    const double p_half = -traj.p_at(half);
    auto rhs = [&](double, const std::array<double, 2>& y, std::array<double, 2>& dy) {
        dy[0] = y[1];
        dy[1] = -potential_gradient(pot, y[0]);
    };
    IntegratorOptions opt;
    auto back = integrate<2>(rhs, {x_half, p_half}, 0.0, half, opt);
    const double scale = pot.d0_bar;
    CHECK(std::fabs(back.y.back()[0]) / scale < 100.0 * rel_tol);
    CHECK(std::fabs(back.y.back()[1]) < 100.0 * rel_tol * scale * params.omega_ratio);
}

TEST_CASE("DW period decreases with d0 up to the well minimum") {
    SystemParams params = paper_params();
    double prev = std::numeric_limits<double>::infinity();
    for (double d0 : {0.01, 0.03, 0.1, 0.3, 0.6, 0.9}) {
        const auto pot = QuarticPotential::candidate(-1, 1, d0, params);
        const double t = period_oracle(pot, params);
        CHECK(t < prev);
        prev = t;
    }
}

TEST_CASE("degenerate and unbounded starts are reported") {
    SystemParams params = paper_params();
    QuarticPotential at_minimum = QuarticPotential::candidate(-1, 1, 1.0, params);
    CHECK_THROWS_WITH_AS(integrate_trajectory(at_minimum, params),
                         doctest::Contains("degenerate equilibrium"), std::runtime_error);

    // inverted-everything potential: motion escapes
    const auto runaway = QuarticPotential::candidate(-1, -1, 0.3, params);
    auto traj = integrate_trajectory(runaway, params);
    CHECK(!traj.closed);
    CHECK(!traj.period_bar.has_value());
    CHECK_THROWS_WITH_AS(period_oracle(runaway, params), doctest::Contains("unbounded"),
                         std::runtime_error);
}

TEST_CASE("constraint report on reference candidates") {
    SystemParams params = paper_params();

    // harmonic: period 2000 pi < 3000 pi, max |alpha2| = 1
    QuarticPotential h;
    h.a = 1;
    h.b = 0;
    h.d_bar = params.d_bar;
    h.omega_ratio = params.omega_ratio;
    h.d0_bar = 0.05 * params.d_bar;
    auto rh = constraint_report(integrate_trajectory(h, params), params);
    CHECK(rh.feasible());
    CHECK(rh.period_margin == doctest::Approx(params.t_gas_bar - 2000.0 * M_PI).epsilon(1e-6));

    // DW feasible mid-range candidate: max |alpha2| = 5 - 3 (d0/d)^2 < 5
    const auto dw = QuarticPotential::candidate(-1, 1, 0.5, params);
    auto traj = integrate_trajectory(dw, params);
    auto rdw = constraint_report(traj, params);
    CHECK(rdw.closed_orbit);
    CHECK(rdw.curvature_ok);
    CHECK(traj.max_abs_alpha2 == doctest::Approx(5.0 - 3.0 * 0.25).epsilon(1e-6));

    // start too close to the barrier top: period exceeds the gas budget
    const auto slow = QuarticPotential::candidate(-1, 1, 0.0005, params);
    auto rslow = constraint_report(integrate_trajectory(slow, params), params);
    CHECK(!rslow.period_ok);
}

TEST_CASE("gas collision time: formula scalings and a worked configuration") {
    const double m_n2 = 4.65e-26;     // kg
    const double temp = 300.0;        // K
    const double radius = 100e-9;     // m
    const double pressure = 6.61e-9;  // Pa

    const double t0 = gas_collision_time(radius, m_n2, temp, pressure);
    CHECK(gas_collision_time(2 * radius, m_n2, temp, pressure) ==
          doctest::Approx(t0 / 4).epsilon(1e-12));
    CHECK(gas_collision_time(radius, m_n2, temp, 2 * pressure) ==
          doctest::Approx(t0 / 2).epsilon(1e-12));

    // a 100 nm sphere in N2 at 300 K and 6.6e-9 Pa paired with a 300 kHz trap
    // sits at the default protocol budget t_gas * Omega / (2 pi) ~ 1500
    const double omega = 2.0 * M_PI * 300e3;
    CHECK(t0 * omega / (2.0 * M_PI) == doctest::Approx(1500.0).epsilon(0.01));

    CHECK_THROWS_AS(gas_collision_time(-1.0, m_n2, temp, pressure), std::domain_error);
}

TEST_CASE("trajectory csv has the expected header and parses back") {
    SystemParams params = paper_params();
    const auto pot = QuarticPotential::candidate(-1, 1, 0.4, params);
    auto traj = integrate_trajectory(pot, params);
    NoiseModel noise;
    noise.s1 = 1e-9;
    noise.l_bar = params.l_bar;

    std::ostringstream os;
    write_trajectory_csv(os, traj, noise);
    std::istringstream is(os.str());
    std::string header;
    std::getline(is, header);
    CHECK(header == "tau,x_bar,p_bar,alpha2,alpha3,gamma_f_bar");

    std::string line;
    std::getline(is, line); // tau = 0 row
    std::istringstream row(line);
    double tau, x, p;
    char comma;
    row >> tau >> comma >> x >> comma >> p;
    CHECK(tau == 0.0);
    CHECK(x == 0.0);
    CHECK(p == 0.0);
}
