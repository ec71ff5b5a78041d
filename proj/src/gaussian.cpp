#include "darkpot/gaussian.hpp"

#include <cmath>
#include <sstream>

#include "darkpot/numerics.hpp"

namespace darkpot {

namespace {

PrincipalAxes axes_with_det(const CovarianceState& c, double det) {
    const double mean = 0.5 * (c.cxx + c.cpp);
    const double diff = 0.5 * (c.cxx - c.cpp);
    const double disc = std::hypot(diff, c.cxp);
    PrincipalAxes ax;
    ax.lambda_plus = mean + disc;
    // lambda_minus via the determinant: the subtraction mean - disc loses
    // all precision once lambda_plus >> 1
    ax.lambda_minus = det / ax.lambda_plus;
    if (disc < 1e-12 * std::fabs(ax.lambda_plus)) {
        ax.theta = 0.0; // degenerate spectrum: any axis works, pick a fixed one
        return ax;
    }
    // eigenvector of lambda_plus: (cxp, lambda_plus - cxx) and
    // (lambda_plus - cpp, cxp) are both valid; take the larger one
    const double v1x = c.cxp, v1p = ax.lambda_plus - c.cxx;
    const double v2x = ax.lambda_plus - c.cpp, v2p = c.cxp;
    double ux, up;
    if (v1x * v1x + v1p * v1p > v2x * v2x + v2p * v2p) {
        ux = v1x;
        up = v1p;
    } else {
        ux = v2x;
        up = v2p;
    }
    double th = std::atan2(up, ux);
    if (th <= -0.5 * M_PI) th += M_PI;
    if (th > 0.5 * M_PI) th -= M_PI;
    ax.theta = th;
    return ax;
}

GaussianTrace sample_trace(OdeSolution<4>&& sol, double t_end) {
    GaussianTrace tr;
    tr.period_bar = t_end;
    tr.dense = std::make_shared<OdeSolution<4>>(std::move(sol));
    tr.times.reserve(kTraceSamples + 1);
    for (int i = 0; i <= kTraceSamples; ++i) {
        const double tau = t_end * i / kTraceSamples;
        auto s = tr.dense->at(tau);
        CovarianceState c{s[0], s[1], s[2]};
        const double det = s[3];
        if (!(det > 0.0) || !(c.cxx > 0.0) || !(c.cpp > 0.0)) {
            std::ostringstream msg;
            msg << "propagate_covariance: integrator failure, covariance lost positivity at tau="
                << tau << " (cxx=" << c.cxx << ", cxp=" << c.cxp << ", cpp=" << c.cpp
                << ", det=" << det << ")";
            throw std::runtime_error(msg.str());
        }
        auto ax = axes_with_det(c, det);
        const double pur = 1.0 / std::sqrt(det);
        tr.times.push_back(tau);
        tr.states.push_back(c);
        tr.lambda_minus.push_back(ax.lambda_minus);
        tr.lambda_plus.push_back(ax.lambda_plus);
        tr.theta.push_back(ax.theta);
        tr.purity.push_back(pur);
        tr.coherence_length.push_back(std::sqrt(8.0 * ax.lambda_plus) * pur);
    }
    return tr;
}

template <class A2, class G>
GaussianTrace run_covariance(A2&& alpha2_of_tau, G&& gamma_of_tau, double omega_ratio,
                             double t_end, double rel_tol, double abs_tol,
                             CovarianceState initial) {
    const double w2 = omega_ratio * omega_ratio;
    auto rhs = [&](double tau, const std::array<double, 4>& c, std::array<double, 4>& dc) {
        const double a2 = alpha2_of_tau(tau);
        const double gamma = gamma_of_tau(tau);
        dc[0] = 2.0 * c[1];
        dc[1] = c[2] - w2 * a2 * c[0];
        dc[2] = -2.0 * w2 * a2 * c[1] + 4.0 * gamma;
        dc[3] = 4.0 * gamma * c[0];
    };
    IntegratorOptions opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = abs_tol;
    auto sol = integrate<4>(rhs, {initial.cxx, initial.cxp, initial.cpp, initial.det()}, 0.0,
                            t_end, opt);
    return sample_trace(std::move(sol), t_end);
}

} // namespace

double GaussianTrace::purity_at(double tau) const {
    return 1.0 / std::sqrt(det_at(tau));
}

double GaussianTrace::xi_at(double tau) const {
    auto s = dense->at(tau);
    const CovarianceState c{s[0], s[1], s[2]};
    return std::sqrt(8.0 * axes_with_det(c, s[3]).lambda_plus) / std::sqrt(s[3]);
}

GaussianTrace propagate_covariance(const QuarticPotential& pot, const NoiseModel& noise,
                                   const Trajectory& traj, double rel_tol, double abs_tol) {
    noise.validate();
    if (!traj.closed || !traj.period_bar)
        throw std::runtime_error("propagate_covariance: trajectory is not closed");

    const auto& dense = *traj.dense;
    auto a2 = [&](double tau) { return taylor_coefficients(pot, dense.at(tau)[0]).alpha2; };
    auto gam = [&](double tau) {
        return dephasing_rate(pot, noise, dense.at(tau)[0]) + noise.gamma0_bar;
    };
    return run_covariance(a2, gam, pot.omega_ratio, *traj.period_bar, rel_tol, abs_tol, {});
}

GaussianTrace propagate_covariance_path(const std::function<double(double)>& alpha2_of_tau,
                                        const std::function<double(double)>& gamma_of_tau,
                                        double omega_ratio, double t_end, double rel_tol,
                                        double abs_tol, CovarianceState initial) {
    return run_covariance(alpha2_of_tau, gamma_of_tau, omega_ratio, t_end, rel_tol, abs_tol,
                          initial);
}

double purity(const CovarianceState& state) {
    const double det = state.det();
    if (!(det > 0.0)) throw std::domain_error("purity: covariance determinant must be positive");
    return 1.0 / std::sqrt(det);
}

PrincipalAxes principal_axes(const CovarianceState& state) {
    return axes_with_det(state, state.det());
}

double coherence_length(const CovarianceState& state) {
    return std::sqrt(8.0 * principal_axes(state).lambda_plus) * purity(state);
}

double verify_coherence_relation(const CovarianceState& state, double x_probe) {
    const auto ax = principal_axes(state);
    // covariance in the frame rotated by theta; the (1,1) entry is the
    // rotated-quadrature variance, independent of the eigendecomposition
    const double c = std::cos(ax.theta), s = std::sin(ax.theta);
    const double var_rot = state.cxx * c * c + 2.0 * state.cxp * s * c + state.cpp * s * s;
    const double det = state.det();

    // Gaussian position density matrix in any canonical frame (scaled units,
    // [x, p] = 2i):  rho(x, x') = (2 pi v)^(-1/2)
    //   * exp(-cc^2/(2 v) - yy^2 det/(8 v) + i cxp' cc yy/(2 v)),
    // with cc = (x + x')/2, yy = x - x', v the position variance.  At the
    // anti-symmetric probe points cc = 0 and the phase drops out.
    const double lhs = std::exp(-x_probe * x_probe * det / (8.0 * var_rot)) /
                       std::sqrt(2.0 * M_PI * var_rot);

    const double xi = coherence_length(state);
    const double rhs = std::exp(-x_probe * x_probe / (xi * xi)) /
                       std::sqrt(2.0 * M_PI * ax.lambda_plus);

    return std::fabs(lhs - rhs) / std::max(std::fabs(rhs), 1e-300);
}

MeritPoint max_coherence_length(const GaussianTrace& trace) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < trace.coherence_length.size(); ++i)
        if (trace.coherence_length[i] > trace.coherence_length[best]) best = i;

    const std::size_t lo = (best == 0) ? 0 : best - 1;
    const std::size_t hi = std::min(best + 1, trace.times.size() - 1);
    auto f = [&](double tau) { return trace.xi_at(tau); };
    auto m = golden_section_max(f, trace.times[lo], trace.times[hi], 1e-6);
    if (m.value >= trace.coherence_length[best]) return {m.value, m.x};
    return {trace.coherence_length[best], trace.times[best]};
}

} // namespace darkpot
