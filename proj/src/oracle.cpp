#include "darkpot/oracle.hpp"

#include <cmath>

#include "darkpot/classical.hpp"
#include "darkpot/cubicity.hpp"
#include "darkpot/gaussian.hpp"
#include "darkpot/model.hpp"
#include "darkpot/qsim.hpp"

namespace darkpot {

namespace {

double rel_err(double got, double want) {
    return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}

} // namespace

std::vector<OracleCheck> run_oracle_suite(const OracleTweaks& tweaks) {
    std::vector<OracleCheck> checks;
    auto add = [&](const std::string& name, double error, double tol) {
        tol *= tweaks.tolerance_scale;
        checks.push_back({name, error, tol, error < tol});
    };
    auto zero = [](double) { return 0.0; };

    // free particle: cxx = 1 + tau^2, cxp = tau, cpp = 1, purity 1
    {
        auto tr = propagate_covariance_path(zero, zero, 1.0, 4.0);
        double e = 0.0;
        for (std::size_t i = 0; i < tr.times.size(); i += 256) {
            const double tau = tr.times[i];
            const auto& c = tr.states[i];
            e = std::max({e, rel_err(c.cxx, 1.0 + tau * tau), rel_err(c.cxp + 1.0, tau + 1.0),
                          rel_err(c.cpp, 1.0), rel_err(tr.purity[i], 1.0)});
        }
        add("free-particle covariance", e, 1e-6);
    }

    // static trap matching the preparation (alpha2 = 1, omega = Omega):
    // the ground state is stationary
    {
        auto tr = propagate_covariance_path([](double) { return 1.0; }, zero, 1.0,
                                            4.0 * M_PI);
        double e = 0.0;
        for (std::size_t i = 0; i < tr.times.size(); i += 256) {
            const auto& c = tr.states[i];
            e = std::max({e, rel_err(c.cxx, 1.0), std::fabs(c.cxp), rel_err(c.cpp, 1.0)});
        }
        add("static-trap stationarity", e, 1e-6);
    }

    // free particle with constant background rate: cpp = 1 + 4 gamma0 tau
    {
        const double g0 = 0.01;
        auto tr = propagate_covariance_path(zero, [=](double) { return g0; }, 1.0, 5.0);
        double e = 0.0;
        for (std::size_t i = 0; i < tr.times.size(); i += 256) {
            const double tau = tr.times[i];
            e = std::max(e, rel_err(tr.states[i].cpp, 1.0 + 4.0 * g0 * tau));
        }
        add("constant-rate momentum heating", e, 1e-6);
    }

    // inverted harmonic (alpha2 = -1): C = S S^T with the cosh/sinh flow
    {
        const double lam = 0.25;
        auto tr = propagate_covariance_path([](double) { return -1.0; }, zero, lam, 8.0);
        double e = 0.0;
        for (std::size_t i = 0; i < tr.times.size(); i += 256) {
            const double t = tr.times[i];
            const double ch = std::cosh(lam * t), sh = std::sinh(lam * t);
            const double cxx = ch * ch + sh * sh / (lam * lam);
            const double cpp = lam * lam * sh * sh + ch * ch;
            const double cxp = ch * sh * (lam + 1.0 / lam);
            const auto& c = tr.states[i];
            e = std::max({e, rel_err(c.cxx, cxx), rel_err(c.cxp, cxp), rel_err(c.cpp, cpp)});
        }
        add("inverted-harmonic growth", e, 1e-6);
    }

    // dephasing closed form at a curvature-only point
    {
        QuarticPotential pot;
        pot.a = 1;
        pot.b = 0;
        pot.d0_bar = 0.0;
        pot.d_bar = 1e6;
        pot.omega_ratio = 1e-3;
        NoiseModel noise;
        noise.s1 = 1e-9;
        noise.l_bar = 1e6;
        const double got = dephasing_rate(pot, noise, 0.0) * tweaks.dephasing_prefactor_scale;
        const double want = 0.5 * M_PI * 1e-12 * 1e-9 * 1e12;
        add("dephasing prefactor", rel_err(got, want), 1e-12);
    }

    // period quadrature: harmonic isochronism and double-well cross-check
    {
        SystemParams params;
        QuarticPotential h;
        h.a = 1;
        h.b = 0;
        h.d_bar = params.d_bar;
        h.omega_ratio = params.omega_ratio;
        h.d0_bar = 0.05 * params.d_bar;
        const double t1 = period_oracle(h, params);
        h.d0_bar = 0.4 * params.d_bar;
        const double t2 = period_oracle(h, params);
        const double want = 2.0 * M_PI / params.omega_ratio;
        add("harmonic period (quadrature)", std::max(rel_err(t1, want), rel_err(t2, want)), 1e-7);

        const auto dw = QuarticPotential::candidate(-1, 1, 0.05, params);
        const auto traj = integrate_trajectory(dw, params);
        add("double-well period consistency",
            rel_err(*traj.period_bar, period_oracle(dw, params)), 1e-6);
    }

    // symplectic flow: rotation at omega = Omega and unit determinant
    {
        auto sym = propagate_symplectic_path([](double) { return 1.0; },
                                             [](double) { return 0.0; }, 1.0, 2.0 * M_PI,
                                             1e-10, 1e-12, 512);
        double e = 0.0, edet = 0.0;
        for (std::size_t i = 0; i < sym.states.size(); i += 32) {
            const double t = sym.times[i];
            const auto& s = sym.states[i];
            e = std::max({e, std::fabs(s.sxx - std::cos(t)), std::fabs(s.sxp - std::sin(t)),
                          std::fabs(s.spx + std::sin(t)), std::fabs(s.spp - std::cos(t))});
            edet = std::max(edet, std::fabs(s.det() - 1.0));
        }
        add("symplectic rotation", e, 1e-6);
        add("symplectic determinant", edet, 1e-8);
    }

    // Wigner transform of the ground state: positive, normalized, marginal
    {
        GridSpec g;
        g.n_points = 256;
        g.x_min_bar = -16.0;
        g.x_max_bar = 16.0;
        g.dt_bar = 0.01;
        auto rho = initial_ground_state(g);
        auto w = wigner_transform(rho);
        double min_w = 0.0, norm = 0.0, marg = 0.0;
        for (double v : w.values) {
            min_w = std::min(min_w, v);
            norm += v;
        }
        norm *= 2.0 * M_PI / g.n_points;
        for (int k = 0; k < g.n_points; ++k)
            marg += w.values[static_cast<std::size_t>(g.n_points / 2) * g.n_points + k];
        marg *= (w.p_max - w.p_min) / g.n_points;
        const double diag = rho.at(g.n_points / 2, g.n_points / 2).real() / g.dx();
        add("wigner positivity (ground state)", std::max(-min_w, 0.0), 1e-10);
        add("wigner normalization", rel_err(norm, 1.0), 1e-6);
        add("wigner marginal", rel_err(marg, diag), 1e-6);
    }

    return checks;
}

} // namespace darkpot
