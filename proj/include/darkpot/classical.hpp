// Classical phase-space trajectory of the scaled Hamiltonian, orbital period
// detection, and the feasibility constraints every optimization candidate
// must satisfy.

#ifndef DARKPOT_CLASSICAL_HPP
#define DARKPOT_CLASSICAL_HPP

#include <memory>
#include <optional>
#include <vector>

#include "darkpot/dop853.hpp"
#include "darkpot/model.hpp"

namespace darkpot {

struct PhasePoint {
    double x_bar = 0.0;
    double p_bar = 0.0;
    double tau = 0.0;
};

/// One integrated orbit starting from rest at the origin.  When the motion
/// is bounded and periodic, `closed` is set and `period_bar` holds Omega*T_c.
/// The dense integrator output is retained so downstream propagations can
/// interpolate x_c(tau) without resampling.
struct Trajectory {
    std::vector<PhasePoint> samples;      // accepted integrator steps
    std::optional<double> period_bar;
    bool closed = false;
    double max_abs_alpha2 = 0.0;          // over one period
    double energy_bar = 0.0;              // conserved E = p^2/2 + V
    QuarticPotential pot;

    std::shared_ptr<const Dop853Solution<2>> dense;

    double x_at(double tau) const { return dense->at(tau)[0]; }
    double p_at(double tau) const { return dense->at(tau)[1]; }
};

/// Integrate from rest at x_bar = 0 until the period is detected or the
/// motion is recognized as unbounded / overlong (tau > 2 t_gas_bar).
/// Throws "degenerate equilibrium" when the start is a stationary point and
/// "integration blow-up" on non-finite state.
Trajectory integrate_trajectory(const QuarticPotential& pot, const SystemParams& params,
                                double rel_tol = 1e-10, double abs_tol = 1e-12);

/// Independent period via the energy quadrature 2 * integral dx / p(x) with
/// p = sqrt(2 (E - V)), turning-point singularities removed by the x = x1 + s^2
/// substitution.  Errors on unbounded orbits and on turning points closer
/// than 1e-12.
double period_oracle(const QuarticPotential& pot, const SystemParams& params);

/// Feasibility of a candidate orbit: closed, curvature-bounded, fast enough.
struct ConstraintReport {
    bool closed_orbit = false;
    bool curvature_ok = false;   // max |alpha2| <= alpha_bound
    bool period_ok = false;      // T_c <= t_gas
    double curvature_margin = 0; // alpha_bound - max |alpha2|
    double period_margin = 0;    // t_gas_bar - period_bar

    bool feasible() const { return closed_orbit && curvature_ok && period_ok; }
};

ConstraintReport constraint_report(const Trajectory& traj, const SystemParams& params);

/// Mean time between gas-molecule collisions for a sphere of radius R (SI
/// seconds):  3 sqrt(m_gas k_B T_gas) / (16 pi sqrt(2 pi) P_gas R^2).
double gas_collision_time(double radius, double gas_mass, double gas_temperature,
                          double gas_pressure);

} // namespace darkpot

#endif
