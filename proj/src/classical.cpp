#include "darkpot/classical.hpp"

#include <cmath>

#include "darkpot/numerics.hpp"

namespace darkpot {

namespace {

struct HamiltonRhs {
    const QuarticPotential& pot;
    void operator()(double, const std::array<double, 2>& y, std::array<double, 2>& dy) const {
        dy[0] = y[1];
        dy[1] = -potential_gradient(pot, y[0]);
    }
};

} // namespace

Trajectory integrate_trajectory(const QuarticPotential& pot, const SystemParams& params,
                                double rel_tol, double abs_tol) {
    pot.validate();
    params.validate();

    const double force0 = -potential_gradient(pot, 0.0);
    if (std::fabs(force0) < 1e-30)
        throw std::runtime_error("integrate_trajectory: degenerate equilibrium at the start");

    const double escape = 10.0 * (pot.d_bar + pot.d0_bar);
    const double tau_cap = 2.0 * params.t_gas_bar;

    IntegratorOptions opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = abs_tol;

    HamiltonRhs rhs{pot};

    bool unbounded = false;
    bool blowup = false;
    double p_prev = 0.0;
    bool moving = false; // becomes true once |p| has left its initial zero

    auto halt = [&](const Dop853Solution<2>& sol) {
        const auto& y = sol.y.back();
        if (!std::isfinite(y[0]) || !std::isfinite(y[1])) {
            blowup = true;
            return true;
        }
        if (std::fabs(y[0]) > escape) {
            unbounded = true;
            return true;
        }
        if (!moving) {
            if (y[1] != 0.0) moving = true;
            p_prev = y[1];
            return false;
        }
        if (p_prev != 0.0 && (y[1] == 0.0 || (p_prev > 0.0) != (y[1] > 0.0))) return true;
        p_prev = y[1];
        return false;
    };

    auto sol = integrate_dop853<2>(rhs, {0.0, 0.0}, 0.0, tau_cap, opt, halt);
    if (blowup) throw std::runtime_error("integrate_trajectory: integration blow-up");

    Trajectory traj;
    traj.pot = pot;
    traj.energy_bar = potential_value(pot, 0.0);

    const bool event = !unbounded && sol.t_end() < tau_cap;
    if (event) {
        // refine the p = 0 turning time on the dense output of the last step
        const double ta = sol.t[sol.t.size() - 2];
        const double tb = sol.t_end();
        double t_turn;
        if (sol.y.back()[1] == 0.0) {
            t_turn = tb;
        } else {
            auto pfun = [&](double tau) { return sol.at(tau)[1]; };
            t_turn = brent_root(pfun, ta, tb, 1e-10 * 2.0 * tb);
        }
        const double period = 2.0 * t_turn;
        // continue the same orbit out to the full period
        if (sol.t_end() < period) {
            auto tail = integrate_dop853<2>(rhs, sol.y.back(), sol.t_end(), period, opt);
            append(sol, tail);
        }
        traj.closed = true;
        traj.period_bar = period;
    }

    auto shared = std::make_shared<Dop853Solution<2>>(std::move(sol));
    traj.dense = shared;
    traj.samples.reserve(shared->t.size());
    for (std::size_t i = 0; i < shared->t.size(); ++i)
        traj.samples.push_back({shared->y[i][0], shared->y[i][1], shared->t[i]});

    // max |alpha2|: alpha2 is monotone in u^2, so orbit extrema dominate; a
    // fine sweep over the dense output guards the bookkeeping anyway.
    const double t_hi = traj.closed ? *traj.period_bar : shared->t_end();
    double m = 0.0;
    const int n_scan = 4096;
    for (int i = 0; i <= n_scan; ++i) {
        const double tau = t_hi * i / n_scan;
        m = std::max(m, std::fabs(taylor_coefficients(pot, shared->at(tau)[0]).alpha2));
    }
    traj.max_abs_alpha2 = m;
    return traj;
}

double period_oracle(const QuarticPotential& pot, const SystemParams& params) {
    pot.validate();
    params.validate();

    const double u0 = -pot.d0_bar; // start at x = 0
    const double energy = potential_value(pot, 0.0);
    auto v = [&](double u) { return potential_value(pot, u + pot.d0_bar); };

    const double f0 = -potential_gradient(pot, 0.0);
    if (std::fabs(f0) < 1e-30) throw std::runtime_error("period_oracle: degenerate equilibrium");
    const double dir = (f0 > 0.0) ? 1.0 : -1.0;

    // bracket the far turning point: first u (along the force direction)
    // where V exceeds the orbit energy.  The step is capped so narrow
    // above-energy windows (IDW rims) cannot be jumped over.
    const double escape = 10.0 * (pot.d_bar + pot.d0_bar);
    const double step_cap = 0.02 * (pot.d_bar + pot.d0_bar);
    double step = std::max(1e-3 * pot.d_bar, 1e-6);
    double a = u0, b = u0;
    bool bracketed = false;
    while (std::fabs(b - u0) < escape) {
        a = b;
        b += dir * step;
        step = std::min(1.5 * step, step_cap);
        if (v(b) > energy) {
            bracketed = true;
            break;
        }
    }
    if (!bracketed) throw std::runtime_error("period_oracle: unbounded orbit");

    const double root_tol = 1e-14 * std::max(1.0, std::fabs(b));
    const double u1 = brent_root([&](double u) { return v(u) - energy; }, a, b, root_tol);

    const double lo = std::min(u0, u1);
    const double hi = std::max(u0, u1);
    if (hi - lo < 1e-12) throw std::runtime_error("period_oracle: degenerate orbit");

    // T = 2 * int du / sqrt(2 (E - V)); substitute u = u_t +/- s^2 at each
    // turning point so the integrand stays finite.  E - V is evaluated in
    // the factored form
    //   V(u_t) - V(u) = w^2/2 (u_t - u)(u_t + u)[a + b (u_t^2 + u^2)/(2 d^2)]
    // with u_t - u = -/+ s^2 taken exactly from the substitution; a direct
    // subtraction of V values loses everything to roundoff near the turning
    // points and stalls the quadrature.
    const double w2 = pot.omega_ratio * pot.omega_ratio;
    const double inv2d2 = 0.5 / (pot.d_bar * pot.d_bar);
    auto e_minus_v = [&](double ut, double residual, double s2, double sgn) {
        const double u = ut + sgn * s2;
        const double diff = (-sgn * s2) * (ut + u) * (pot.a + pot.b * (ut * ut + u * u) * inv2d2);
        return residual + 0.5 * w2 * diff;
    };
    const double r_lo = energy - v(lo); // ~0: exact at the rest point, root residual otherwise
    const double r_hi = energy - v(hi);

    const double mid = 0.5 * (lo + hi);
    auto left = [&](double s) {
        const double ev = e_minus_v(lo, r_lo, s * s, 1.0);
        if (ev <= 0.0) return 0.0; // only within ~|residual| of the endpoint
        return 2.0 * s / std::sqrt(2.0 * ev);
    };
    auto right = [&](double s) {
        const double ev = e_minus_v(hi, r_hi, s * s, -1.0);
        if (ev <= 0.0) return 0.0;
        return 2.0 * s / std::sqrt(2.0 * ev);
    };
    const double tl = integrate_adaptive(left, 0.0, std::sqrt(mid - lo), 1e-12);
    const double tr = integrate_adaptive(right, 0.0, std::sqrt(hi - mid), 1e-12);
    return 2.0 * (tl + tr);
}

ConstraintReport constraint_report(const Trajectory& traj, const SystemParams& params) {
    ConstraintReport r;
    r.closed_orbit = traj.closed;
    r.curvature_margin = params.alpha_bound - traj.max_abs_alpha2;
    r.curvature_ok = r.curvature_margin >= 0.0;
    if (traj.period_bar) {
        r.period_margin = params.t_gas_bar - *traj.period_bar;
        r.period_ok = r.period_margin >= 0.0;
    } else {
        r.period_margin = -params.t_gas_bar;
        r.period_ok = false;
    }
    return r;
}

double gas_collision_time(double radius, double gas_mass, double gas_temperature,
                          double gas_pressure) {
    if (!(radius > 0.0 && gas_mass > 0.0 && gas_temperature > 0.0 && gas_pressure > 0.0))
        throw std::domain_error("gas_collision_time: inputs must be positive");
    constexpr double k_boltzmann = 1.380649e-23; // J/K
    return 3.0 * std::sqrt(gas_mass * k_boltzmann * gas_temperature) /
           (16.0 * M_PI * std::sqrt(2.0 * M_PI) * gas_pressure * radius * radius);
}

} // namespace darkpot
