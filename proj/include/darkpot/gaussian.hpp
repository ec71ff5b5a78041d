// Gaussian (covariance-matrix) dynamics along a classical orbit: propagation
// under the local quadratic Hamiltonian with position-dephasing, principal
// axes, purity, and the coherence-length figure of merit.

#ifndef DARKPOT_GAUSSIAN_HPP
#define DARKPOT_GAUSSIAN_HPP

#include <functional>
#include <memory>
#include <vector>

#include "darkpot/classical.hpp"
#include "darkpot/model.hpp"
#include "darkpot/ode.hpp"

namespace darkpot {

/// Scaled second moments (C_xx/x0^2, C_xp/(x0 p0), C_pp/p0^2).
struct CovarianceState {
    double cxx = 1.0;
    double cxp = 0.0;
    double cpp = 1.0;

    double det() const { return cxx * cpp - cxp * cxp; }
};

struct PrincipalAxes {
    double lambda_minus;
    double lambda_plus;
    double theta; // angle of the lambda_plus eigenvector, in (-pi/2, pi/2]
};

/// Covariance history over one orbit, sampled on a uniform grid, with the
/// derived per-time quantities filled in.  The dense ODE output is kept so
/// merit refinement can evaluate between grid points.
struct GaussianTrace {
    std::vector<double> times;
    std::vector<CovarianceState> states;
    std::vector<double> lambda_minus;
    std::vector<double> lambda_plus;
    std::vector<double> theta;
    std::vector<double> purity;
    std::vector<double> coherence_length;
    double period_bar = 0.0;

    // dense components: (cxx, cxp, cpp, det).  The determinant is carried as
    // its own ODE component, d det/dtau = 4 gamma cxx; forming it from the
    // stored entries would cancel catastrophically once the state is
    // strongly squeezed.
    std::shared_ptr<const OdeSolution<4>> dense;

    CovarianceState state_at(double tau) const {
        auto s = dense->at(tau);
        return {s[0], s[1], s[2]};
    }
    double det_at(double tau) const { return dense->at(tau)[3]; }
    double purity_at(double tau) const;
    double xi_at(double tau) const;
};

/// Number of uniform sampling intervals per period in the returned traces.
inline constexpr int kTraceSamples = 4096;

/// Propagate the pure preparation-trap ground state (identity covariance)
/// along a closed trajectory.  alpha2 and the dephasing rate are evaluated
/// on the trajectory's dense output.  Throws on non-closed trajectories and
/// on covariance positivity loss.
GaussianTrace propagate_covariance(const QuarticPotential& pot, const NoiseModel& noise,
                                   const Trajectory& traj, double rel_tol = 1e-10,
                                   double abs_tol = 1e-12);

/// Same propagation with caller-supplied alpha2(tau) and total dephasing
/// rate gamma(tau); used by the analytic reference cases (free, static trap,
/// inverted harmonic) that have no regular trajectory.
GaussianTrace propagate_covariance_path(const std::function<double(double)>& alpha2_of_tau,
                                        const std::function<double(double)>& gamma_of_tau,
                                        double omega_ratio, double t_end,
                                        double rel_tol = 1e-10, double abs_tol = 1e-12,
                                        CovarianceState initial = {});

/// 1 / sqrt(det C); throws on non-positive determinant.
double purity(const CovarianceState& state);

/// Eigen-decomposition of the symmetric 2x2 covariance.  theta is the angle
/// of the maximum-variance direction; degenerate spectra tie-break to 0.
PrincipalAxes principal_axes(const CovarianceState& state);

/// xi/x0 = sqrt(8 lambda_plus) * purity.
double coherence_length(const CovarianceState& state);

/// Relative residual of the off-diagonal identity
///   <-x/2| rho |x/2> = (2 pi lambda_plus)^(-1/2) exp(-x^2/xi^2)
/// along the maximum-expansion quadrature, with the left side built from the
/// rotated-frame Gaussian density matrix directly.
double verify_coherence_relation(const CovarianceState& state, double x_probe);

struct MeritPoint {
    double value = 0.0;
    double tau = 0.0;
};

/// max over [0, T_c] of the coherence length: grid scan plus golden-section
/// refinement around the grid argmax.
MeritPoint max_coherence_length(const GaussianTrace& trace);

} // namespace darkpot

#endif
