// Adaptive Dormand-Prince 5(4) integrator with continuous (dense) output.
//
// The trajectory, covariance, and symplectic-frame propagations all run
// through this stepper.  Dense output is the 4th-order interpolant built
// from the seven internal stages, which is what period events and the
// merit refinements query between accepted steps.

#ifndef DARKPOT_ODE_HPP
#define DARKPOT_ODE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace darkpot {

struct IntegratorOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    long max_steps = 50'000'000;
    double initial_step = 0.0; // 0 = choose automatically
};

/// Continuous solution on [t.front(), t.back()].  Each accepted step stores
/// the five interpolation vectors of the Dormand-Prince dense formula.
template <int N>
struct OdeSolution {
    using State = std::array<double, N>;

    std::vector<double> t;      // accepted times, t[0] = start
    std::vector<State> y;       // states at t
    // rc[k][i]: interpolation vector k for step i (step i spans t[i]..t[i+1])
    std::vector<std::array<State, 5>> rc;

    double t_begin() const { return t.front(); }
    double t_end() const { return t.back(); }
    std::size_t steps() const { return rc.size(); }

    /// Interpolated state at time ti (clamped to the covered interval).
    State at(double ti) const {
        if (t.size() == 1) return y.front();
        auto it = std::upper_bound(t.begin(), t.end(), ti);
        std::size_t i = (it == t.begin()) ? 0 : static_cast<std::size_t>(it - t.begin()) - 1;
        if (i >= rc.size()) i = rc.size() - 1;
        const double h = t[i + 1] - t[i];
        const double th = std::clamp((ti - t[i]) / h, 0.0, 1.0);
        const double th1 = 1.0 - th;
        State out;
        const auto& r = rc[i];
        for (int k = 0; k < N; ++k)
            out[k] = r[0][k] + th * (r[1][k] + th1 * (r[2][k] + th * (r[3][k] + th1 * r[4][k])));
        return out;
    }

    double component_at(double ti, int k) const { return at(ti)[k]; }
};

namespace detail {

// Dormand-Prince 5(4) tableau (FSAL form) and dense-output weights.
inline constexpr double dp_c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double dp_a[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
inline constexpr double dp_e[7] = {71.0 / 57600, 0.0, -71.0 / 16695, 71.0 / 1920,
                                   -17253.0 / 339200, 22.0 / 525, -1.0 / 40};
inline constexpr double dp_d[7] = {-12715105075.0 / 11282082432.0,
                                   0.0,
                                   87487479700.0 / 32700410799.0,
                                   -10690763975.0 / 1880347072.0,
                                   701980252875.0 / 199316789632.0,
                                   -1453857185.0 / 822651844.0,
                                   69997945.0 / 29380423.0};

} // namespace detail

/// Integrate dy/dt = rhs(t, y) from t0 to t1 with adaptive step control.
///
/// After every accepted step `halt(sol)` is consulted; returning true stops
/// the integration (the step just taken stays part of the solution).
/// Callers that need to continue past a detected event integrate a second
/// segment from the last accepted state and merge it with append().
template <int N, class Rhs, class Halt>
OdeSolution<N> integrate(Rhs&& rhs, std::array<double, N> y0, double t0, double t1,
                         const IntegratorOptions& opt, Halt&& halt) {
    using State = std::array<double, N>;
    if (!(t1 > t0)) throw std::invalid_argument("integrate: t1 must exceed t0");

    OdeSolution<N> sol;
    sol.t.push_back(t0);
    sol.y.push_back(y0);

    State k[7];
    rhs(t0, y0, k[0]);

    auto err_norm = [&](const State& ya, const State& yb, const State& e) {
        double s = 0.0;
        for (int i = 0; i < N; ++i) {
            const double sc = opt.abs_tol + opt.rel_tol * std::max(std::fabs(ya[i]), std::fabs(yb[i]));
            const double q = e[i] / sc;
            s += q * q;
        }
        return std::sqrt(s / N);
    };

    // initial step: crude |y|/|f| heuristic, bounded by the interval
    double h = opt.initial_step;
    if (h <= 0.0) {
        double fn = 0.0, yn = 0.0;
        for (int i = 0; i < N; ++i) {
            fn = std::max(fn, std::fabs(k[0][i]));
            yn = std::max(yn, std::fabs(y0[i]));
        }
        h = (fn > 0.0) ? 0.01 * std::max(yn, 1.0) / fn : 1e-4 * (t1 - t0);
        h = std::min(h, 1e-2 * (t1 - t0));
        h = std::max(h, 1e3 * std::numeric_limits<double>::min());
    }
    h = std::min(h, opt.max_step);

    double t = t0;
    State y = y0;
    long nsteps = 0;
    bool rejected = false;

    while (t < t1) {
        if (++nsteps > opt.max_steps) throw std::runtime_error("integrate: step limit exceeded");
        h = std::min({h, opt.max_step, t1 - t});
        if (t + h == t) throw std::runtime_error("integrate: step size underflow");

        State ytmp, ynew, yerr;
        for (int s = 1; s < 7; ++s) {
            for (int i = 0; i < N; ++i) {
                double acc = 0.0;
                for (int j = 0; j < s; ++j) acc += detail::dp_a[s][j] * k[j][i];
                ytmp[i] = y[i] + h * acc;
            }
            rhs(t + detail::dp_c[s] * h, ytmp, k[s]);
        }
        ynew = ytmp; // stage 7 input is the 5th-order solution (FSAL)
        for (int i = 0; i < N; ++i) {
            double acc = 0.0;
            for (int j = 0; j < 7; ++j) acc += detail::dp_e[j] * k[j][i];
            yerr[i] = h * acc;
        }

        const double err = err_norm(y, ynew, yerr);
        if (err <= 1.0) {
            // dense coefficients for this step
            std::array<State, 5> r;
            for (int i = 0; i < N; ++i) {
                const double dy = ynew[i] - y[i];
                double acc = 0.0;
                for (int j = 0; j < 7; ++j) acc += detail::dp_d[j] * k[j][i];
                r[0][i] = y[i];
                r[1][i] = dy;
                r[2][i] = h * k[0][i] - dy;
                r[3][i] = dy - h * k[6][i] - r[2][i];
                r[4][i] = h * acc;
            }
            sol.rc.push_back(r);
            t += h;
            y = ynew;
            k[0] = k[6]; // FSAL
            sol.t.push_back(t);
            sol.y.push_back(y);

            double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
            fac = std::min(rejected ? 1.0 : 10.0, std::max(0.2, fac));
            h *= fac;
            rejected = false;

            if (halt(sol)) break;
        } else {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            rejected = true;
        }
    }
    return sol;
}

template <int N, class Rhs>
OdeSolution<N> integrate(Rhs&& rhs, std::array<double, N> y0, double t0, double t1,
                         const IntegratorOptions& opt = {}) {
    return integrate<N>(std::forward<Rhs>(rhs), y0, t0, t1, opt,
                        [](const OdeSolution<N>&) { return false; });
}

/// Splice `tail` (which must start at head.t_end() with head's final state)
/// onto `head`, forming one continuous solution.
template <int N>
void append(OdeSolution<N>& head, const OdeSolution<N>& tail) {
    if (tail.t.empty() || tail.rc.empty()) return;
    if (std::fabs(tail.t.front() - head.t_end()) >
        1e-12 * std::max(1.0, std::fabs(head.t_end())))
        throw std::logic_error("append: segments are not contiguous");
    head.t.insert(head.t.end(), tail.t.begin() + 1, tail.t.end());
    head.y.insert(head.y.end(), tail.y.begin() + 1, tail.y.end());
    head.rc.insert(head.rc.end(), tail.rc.begin(), tail.rc.end());
}

} // namespace darkpot

#endif
