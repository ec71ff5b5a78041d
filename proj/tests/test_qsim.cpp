#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "darkpot/gaussian.hpp"
#include "darkpot/qsim.hpp"

using namespace darkpot;

namespace {

GridSpec small_grid(int n, double half_width, double dt) {
    GridSpec g;
    g.n_points = n;
    g.x_min_bar = -half_width;
    g.x_max_bar = half_width;
    g.dt_bar = dt;
    return g;
}

QuarticPotential free_pot() {
    QuarticPotential p;
    p.a = 0;
    p.b = 0;
    p.d_bar = 1.0;
    p.omega_ratio = 1.0;
    return p;
}

// alpha2 = 1 at omega = Omega reproduces the preparation trap
QuarticPotential resonant_trap() {
    QuarticPotential p;
    p.a = 1;
    p.b = 0;
    p.d_bar = 1e6;
    p.omega_ratio = 1.0;
    return p;
}

} // namespace

TEST_CASE("ground state construction: trace, purity, variance, tail guard") {
    auto g = small_grid(256, 16.0, 0.01);
    auto rho = initial_ground_state(g);
    CHECK(rho.trace() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rho.purity() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rho.variance_x() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(rho.hermiticity_error() < 1e-14);

    auto tight = small_grid(64, 4.0, 0.01); // tail above 1e-16 at the edge
    CHECK_THROWS_AS(initial_ground_state(tight), std::invalid_argument);
}

TEST_CASE("free evolution matches the covariance closed form") {
    auto g = small_grid(256, 16.0, 0.01);
    auto rho = initial_ground_state(g);
    SplitStepPropagator prop(free_pot(), g);
    const double t_end = 2.0;
    const int steps = static_cast<int>(std::round(t_end / g.dt_bar));
    for (int k = 0; k < steps; ++k) prop.advance(rho, 0.0);

    auto w = wigner_transform(rho);
    auto m = wigner_moments(w);
    CHECK(m.cxx == doctest::Approx(1.0 + t_end * t_end).epsilon(1e-6));
    CHECK(m.cxp == doctest::Approx(t_end).epsilon(1e-6));
    CHECK(m.cpp == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(rho.trace() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rho.purity() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(rho.hermiticity_error() < 1e-10);
}

TEST_CASE("dephasing factor: exact single-step ratio, monotone purity") {
    auto g = small_grid(256, 16.0, 0.02);
    auto rho0 = initial_ground_state(g);
    const double gamma = 0.35;

    auto with_g = step(rho0, free_pot(), gamma, g);
    auto without = step(rho0, free_pot(), 0.0, g);
    const int n = g.n_points;
    double worst = 0.0;
    for (int i = n / 4; i < 3 * n / 4; i += 5)
        for (int j = n / 4; j < 3 * n / 4; j += 7) {
            if (std::abs(without.at(i, j)) < 1e-10) continue;
            const double sep = g.x_at(i) - g.x_at(j);
            const double expected = std::exp(-0.5 * gamma * sep * sep * g.dt_bar);
            const double got = std::abs(with_g.at(i, j)) / std::abs(without.at(i, j));
            worst = std::max(worst, std::fabs(got - expected));
        }
    CHECK(worst < 1e-12);

    // multi-step: second moments track the covariance ODE with the same
    // rate; the trailing dephasing factor is first order in gamma dt, so
    // the comparison runs at a small step
    auto g2 = g;
    g2.dt_bar = 0.005;
    const double rate = 0.1;
    auto rho = rho0;
    SplitStepPropagator prop(free_pot(), g2);
    double purity_prev = rho.purity();
    const int steps = 160;
    for (int k = 0; k < steps; ++k) {
        prop.advance(rho, rate);
        const double p = rho.purity();
        CHECK(p <= purity_prev + 1e-12);
        purity_prev = p;
    }
    const double t_end = steps * g2.dt_bar;
    auto ref = propagate_covariance_path([](double) { return 0.0; },
                                         [=](double) { return rate; }, 1.0, t_end);
    auto m = wigner_moments(wigner_transform(rho));
    const auto& c = ref.states.back();
    CHECK(m.cxx == doctest::Approx(c.cxx).epsilon(1e-3));
    CHECK(m.cxp == doctest::Approx(c.cxp).epsilon(1e-3));
    CHECK(m.cpp == doctest::Approx(c.cpp).epsilon(1e-3));
    CHECK(rho.purity() == doctest::Approx(ref.purity.back()).epsilon(1e-3));
}

TEST_CASE("resonant trap: the ground state is stationary over a full period") {
    auto g = small_grid(128, 16.0, 2e-3);
    auto rho = initial_ground_state(g);
    auto rho0 = rho;
    SplitStepPropagator prop(resonant_trap(), g);
    const int steps = static_cast<int>(std::round(2.0 * M_PI / g.dt_bar));
    for (int k = 0; k < steps; ++k) prop.advance(rho, 0.0);

    // fidelity via Tr[rho rho0] for pure states
    std::complex<double> overlap = 0.0;
    const int n = g.n_points;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) overlap += rho.at(i, j) * std::conj(rho0.at(i, j));
    CHECK(overlap.real() > 1.0 - 1e-6);
}

TEST_CASE("wigner transform: ground state positive, marginals exact") {
    auto g = small_grid(256, 14.0, 0.01);
    auto rho = initial_ground_state(g);
    auto w = wigner_transform(rho);

    double min_w = 0.0, norm = 0.0;
    for (double v : w.values) {
        min_w = std::min(min_w, v);
        norm += v;
    }
    CHECK(min_w > -1e-10);
    CHECK(norm * 2.0 * M_PI / g.n_points == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(negativity_volume(w) == doctest::Approx(0.0));

    const double dp = (w.p_max - w.p_min) / w.n;
    for (int i : {64, 128, 200}) {
        double marg = 0.0;
        for (int k = 0; k < w.n; ++k)
            marg += w.values[static_cast<std::size_t>(i) * w.n + k];
        marg *= dp;
        CHECK(marg == doctest::Approx(rho.at(i, i).real() / g.dx()).epsilon(1e-8));
    }
}

TEST_CASE("number-mode superposition shows true Wigner negativity") {
    // psi ~ (1 + c H2) gaussian: a 0/2 number-state superposition
    auto g = small_grid(512, 16.0, 0.01);
    const int n = g.n_points;
    const double c2 = 0.45;
    std::vector<double> psi(n);
    double norm = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = g.x_at(i);
        psi[i] = (1.0 + c2 * (x * x - 1.0)) * std::exp(-0.25 * x * x);
        norm += psi[i] * psi[i];
    }
    DensityMatrixGrid rho;
    rho.grid = g;
    rho.values.resize(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) rho.at(i, j) = psi[i] * psi[j] / norm;

    auto w = wigner_transform(rho);
    double min_w = 0.0;
    for (double v : w.values) min_w = std::min(min_w, v);
    CHECK(min_w < -1e-4);
    CHECK(w.negativity_volume > 0.01);

    // independent route: direct quadrature of the analytic wave function,
    // W(x, p) = (1/2pi) int psi(x+u) psi(x-u) e^{-i p u} du / |psi|^2
    auto psi_c = [&](double x) {
        return (1.0 + c2 * (x * x - 1.0)) * std::exp(-0.25 * x * x);
    };
    const double dx = g.dx();
    const double dp = (w.p_max - w.p_min) / w.n;
    const double psi_norm = norm * dx;
    for (double xp : {0.0, 0.8, 1.7}) {
        for (double pp : {0.0, 0.9, 2.1}) {
            const int gi = static_cast<int>(std::lround((xp - w.x_min) / dx));
            const int gk = static_cast<int>(std::lround((pp - w.p_min) / dp));
            const double x_snap = w.x_min + gi * dx, p_snap = w.p_min + gk * dp;
            double direct = 0.0;
            const double du = 5e-4;
            for (double u = -14.0; u <= 14.0; u += du)
                direct += psi_c(x_snap + u) * psi_c(x_snap - u) * std::cos(p_snap * u) * du;
            direct /= 2.0 * M_PI * psi_norm;
            const double grid_w = w.values[static_cast<std::size_t>(gi) * w.n + gk];
            CHECK(std::fabs(grid_w - direct) < 1e-6 + 5e-4 * std::fabs(direct));
        }
    }
}

TEST_CASE("cubic-phase state: positive negativity with grid self-convergence") {
    auto build = [](int n, double half) {
        GridSpec g = small_grid(n, half, 0.01);
        std::vector<std::complex<double>> psi(n);
        double norm = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = g.x_at(i);
            const double amp = std::exp(-0.25 * x * x);
            psi[i] = std::polar(amp, -x * x * x);
            norm += amp * amp;
        }
        DensityMatrixGrid rho;
        rho.grid = g;
        rho.values.resize(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) rho.at(i, j) = psi[i] * std::conj(psi[j]) / norm;
        return wigner_transform(rho).negativity_volume;
    };
    const double n512 = build(512, 12.0);
    const double n1024 = build(1024, 12.0);
    const double n2048 = build(2048, 12.0);
    CHECK(n1024 > 0.1);
    CHECK(std::fabs(n2048 - n1024) / n2048 < 0.01);
    // refinement gains negativity until the plateau
    CHECK(n1024 >= n512 - 1e-3 * n1024);
}

TEST_CASE("step pre-condition: oversized potential phase is rejected") {
    SystemParams desk = SystemParams::desk_scale();
    const auto dw = QuarticPotential::candidate(-1, 1, 0.05, desk);
    GridSpec g = small_grid(256, 120.0, 50.0); // absurd dt
    CHECK_THROWS_WITH_AS(SplitStepPropagator(dw, g), doctest::Contains("0.5 rad"),
                         std::invalid_argument);
}

TEST_CASE("grid validation") {
    GridSpec g;
    g.n_points = 100; // not a power of two
    g.x_min_bar = -1;
    g.x_max_bar = 1;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}
