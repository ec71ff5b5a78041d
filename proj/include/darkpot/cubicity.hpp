// Symplectic Gaussian-frame propagation and the coherent-cubicity figure of
// merit: quadrature squeezing eta, quadrature angle phi, the cubic-phase
// accumulation integrals, and their purity-weighted maximum.

#ifndef DARKPOT_CUBICITY_HPP
#define DARKPOT_CUBICITY_HPP

#include <memory>
#include <span>
#include <vector>

#include "darkpot/classical.hpp"
#include "darkpot/gaussian.hpp"
#include "darkpot/model.hpp"
#include "darkpot/ode.hpp"

namespace darkpot {

/// Entries of the symplectic frame matrix S (det S = 1).
struct SymplecticState {
    double sxx = 1.0, sxp = 0.0;
    double spx = 0.0, spp = 1.0;

    double det() const { return sxx * spp - sxp * spx; }
};

/// S(tau) over one period plus the cubic-phase integrals, which are
/// accumulated inside the same ODE solve as augmented state (the integrand
/// spikes at the quartic wall, so it rides on the adaptive stepper instead
/// of a post-hoc quadrature over samples).
struct SymplecticSolution {
    std::vector<double> times;
    std::vector<SymplecticState> states;
    std::vector<double> beta_s; // int_0^tau (omega/Omega) beta sin(phi) dtau'
    std::vector<double> beta_c; // int_0^tau (omega/Omega) beta cos(phi) dtau'
    double period_bar = 0.0;

    std::shared_ptr<const OdeSolution<6>> dense;
};

/// Per-time cubicity record over one period.
struct CubicityTrace {
    std::vector<double> times;
    std::vector<double> eta;
    std::vector<double> phi; // unwrapped, continuous
    std::vector<double> beta;
    std::vector<double> beta_s;
    std::vector<double> beta_c;
    std::vector<double> kappa;
    std::vector<double> coherent_cubicity; // K = |kappa| * purity
    double period_bar = 0.0;

    std::shared_ptr<const OdeSolution<6>> dense;       // S + integrals
    std::shared_ptr<const OdeSolution<4>> gauss_dense; // covariance + det, for purity

    double kappa_at(double tau) const;
    double coherent_cubicity_at(double tau) const;
};

/// Propagate dS/dtau = [[0, 1], [-(omega/Omega)^2 alpha2(tau), 0]] S from the
/// identity along a closed trajectory.  The physical weight omega dt of the
/// cubic-phase integrands becomes (omega/Omega) dtau in scaled time; that
/// single power is pinned by a physical-time quadrature cross-check in the
/// tests.
SymplecticSolution propagate_symplectic(const QuarticPotential& pot, const Trajectory& traj,
                                        double rel_tol = 1e-10, double abs_tol = 1e-12);

/// Variant with a caller-supplied alpha2(tau) and beta weight alpha3(tau),
/// for the analytic reference cases.
SymplecticSolution propagate_symplectic_path(const std::function<double(double)>& alpha2_of_tau,
                                             const std::function<double(double)>& alpha3_of_tau,
                                             double omega_ratio, double t_end,
                                             double rel_tol = 1e-10, double abs_tol = 1e-12,
                                             int n_samples = kTraceSamples);

struct QuadratureAngles {
    std::vector<double> eta;
    std::vector<double> phi; // unwrapped
};

/// eta = sqrt(Sxx^2 + Sxp^2) and the continuous quadrature angle.  The raw
/// atan2 angle is unwrapped by the multiple of pi that minimizes the jump;
/// a residual jump >= pi/2 raises "undersampled angle".
QuadratureAngles quadrature_decomposition(std::span<const SymplecticState> states);

/// Assemble the cubicity record from trajectory, covariance and symplectic
/// solutions; all three must share the sampling grid.
CubicityTrace cubicity_trace(const QuarticPotential& pot, const Trajectory& traj,
                             const GaussianTrace& gauss, const SymplecticSolution& sym);

/// max over [0, T_c] of K(tau): grid scan plus golden-section refinement.
MeritPoint coherent_cubicity_merit(const CubicityTrace& trace);

} // namespace darkpot

#endif
