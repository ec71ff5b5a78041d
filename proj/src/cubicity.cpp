#include "darkpot/cubicity.hpp"

#include <cmath>

#include "darkpot/numerics.hpp"

namespace darkpot {

namespace {

// Augmented state: (Sxx, Sxp, Spx, Spp, beta_s, beta_c).  Using
// sin(phi) = Sxp/eta, cos(phi) = Sxx/eta, the integrands reduce to
// polynomials in the matrix entries:
//   d beta_s = (omega/Omega) * (3/2) alpha3 eta^2 Sxp,
//   d beta_c = (omega/Omega) * (3/2) alpha3 eta^2 Sxx.
template <class A2, class A3>
SymplecticSolution run_symplectic(A2&& alpha2_of_tau, A3&& alpha3_of_tau, double omega_ratio,
                                  double t_end, double rel_tol, double abs_tol, int n_samples) {
    const double w2 = omega_ratio * omega_ratio;
    auto rhs = [&](double tau, const std::array<double, 6>& y, std::array<double, 6>& dy) {
        const double a2 = alpha2_of_tau(tau);
        const double a3 = alpha3_of_tau(tau);
        const double eta2 = y[0] * y[0] + y[1] * y[1];
        dy[0] = y[2];
        dy[1] = y[3];
        dy[2] = -w2 * a2 * y[0];
        dy[3] = -w2 * a2 * y[1];
        dy[4] = omega_ratio * 1.5 * a3 * eta2 * y[1];
        dy[5] = omega_ratio * 1.5 * a3 * eta2 * y[0];
    };

    IntegratorOptions opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = abs_tol;
    auto sol = integrate<6>(rhs, {1.0, 0.0, 0.0, 1.0, 0.0, 0.0}, 0.0, t_end, opt);

    SymplecticSolution out;
    out.period_bar = t_end;
    out.dense = std::make_shared<OdeSolution<6>>(std::move(sol));
    out.times.reserve(n_samples + 1);
    for (int i = 0; i <= n_samples; ++i) {
        const double tau = t_end * i / n_samples;
        auto y = out.dense->at(tau);
        out.times.push_back(tau);
        out.states.push_back({y[0], y[1], y[2], y[3]});
        out.beta_s.push_back(y[4]);
        out.beta_c.push_back(y[5]);
    }
    return out;
}

} // namespace

double CubicityTrace::kappa_at(double tau) const {
    auto y = dense->at(tau);
    return std::hypot(y[4], y[5]);
}

double CubicityTrace::coherent_cubicity_at(double tau) const {
    return kappa_at(tau) / std::sqrt(gauss_dense->at(tau)[3]);
}

SymplecticSolution propagate_symplectic(const QuarticPotential& pot, const Trajectory& traj,
                                        double rel_tol, double abs_tol) {
    if (!traj.closed || !traj.period_bar)
        throw std::runtime_error("propagate_symplectic: trajectory is not closed");
    const auto& dense = *traj.dense;
    auto a2 = [&](double tau) { return taylor_coefficients(pot, dense.at(tau)[0]).alpha2; };
    auto a3 = [&](double tau) { return taylor_coefficients(pot, dense.at(tau)[0]).alpha3; };
    return run_symplectic(a2, a3, pot.omega_ratio, *traj.period_bar, rel_tol, abs_tol,
                          kTraceSamples);
}

SymplecticSolution propagate_symplectic_path(const std::function<double(double)>& alpha2_of_tau,
                                             const std::function<double(double)>& alpha3_of_tau,
                                             double omega_ratio, double t_end, double rel_tol,
                                             double abs_tol, int n_samples) {
    return run_symplectic(alpha2_of_tau, alpha3_of_tau, omega_ratio, t_end, rel_tol, abs_tol,
                          n_samples);
}

QuadratureAngles quadrature_decomposition(std::span<const SymplecticState> states) {
    QuadratureAngles out;
    out.eta.reserve(states.size());
    out.phi.reserve(states.size());
    double prev = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto& s = states[i];
        out.eta.push_back(std::hypot(s.sxx, s.sxp));
        const double raw = std::atan2(s.sxp, s.sxx);
        if (i == 0) {
            prev = raw;
        } else {
            // minimal jump in multiples of pi, not 2 pi: near a caustic the
            // row of S sweeps through the origin and the raw angle flips by
            // ~pi within one sample no matter how fine the grid; folding by
            // pi keeps the reported angle continuous there (the accumulation
            // integrals never see this -- they use the S entries directly)
            const double jump = std::remainder(raw - prev, M_PI);
            if (std::fabs(jump) >= 0.5 * M_PI)
                throw std::runtime_error(
                    "quadrature_decomposition: undersampled angle, use a finer grid");
            prev += jump;
        }
        out.phi.push_back(prev);
    }
    return out;
}

CubicityTrace cubicity_trace(const QuarticPotential& pot, const Trajectory& traj,
                             const GaussianTrace& gauss, const SymplecticSolution& sym) {
    if (gauss.times.size() != sym.times.size())
        throw std::runtime_error("cubicity_trace: sampling grids differ");
    for (std::size_t i = 0; i < sym.times.size(); i += 512)
        if (std::fabs(gauss.times[i] - sym.times[i]) >
            1e-9 * std::max(1.0, std::fabs(sym.times[i])))
            throw std::runtime_error("cubicity_trace: sampling grids differ");

    auto angles = quadrature_decomposition(sym.states);

    CubicityTrace tr;
    tr.times = sym.times;
    tr.period_bar = sym.period_bar;
    tr.eta = angles.eta;
    tr.phi = angles.phi;
    tr.beta_s = sym.beta_s;
    tr.beta_c = sym.beta_c;
    tr.dense = sym.dense;
    tr.gauss_dense = gauss.dense;

    const std::size_t n = sym.times.size();
    tr.beta.resize(n);
    tr.kappa.resize(n);
    tr.coherent_cubicity.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a3 = taylor_coefficients(pot, traj.x_at(sym.times[i])).alpha3;
        const double e = tr.eta[i];
        tr.beta[i] = 1.5 * a3 * e * e * e;
        tr.kappa[i] = std::hypot(sym.beta_s[i], sym.beta_c[i]);
        tr.coherent_cubicity[i] = tr.kappa[i] * gauss.purity[i];
    }
    return tr;
}

MeritPoint coherent_cubicity_merit(const CubicityTrace& trace) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < trace.coherent_cubicity.size(); ++i)
        if (trace.coherent_cubicity[i] > trace.coherent_cubicity[best]) best = i;
    if (trace.coherent_cubicity[best] == 0.0) return {0.0, 0.0};

    const std::size_t lo = (best == 0) ? 0 : best - 1;
    const std::size_t hi = std::min(best + 1, trace.times.size() - 1);
    auto f = [&](double tau) { return trace.coherent_cubicity_at(tau); };
    auto m = golden_section_max(f, trace.times[lo], trace.times[hi], 1e-6);
    if (m.value >= trace.coherent_cubicity[best]) return {m.value, m.x};
    return {trace.coherent_cubicity[best], trace.times[best]};
}

} // namespace darkpot
