// Unit system, quartic potential family, noise model, and the pointwise
// Taylor/dephasing evaluations used by every other component.
//
// Everything is dimensionless: positions in units of the zero-point motion
// x0 = sqrt(hbar/(2 m Omega)) of the preparation trap, momenta in
// p0 = hbar/(2 x0), times scaled by the trap frequency (tau = Omega t).
// Energies are measured in m Omega^2 x0^2 = hbar Omega / 2, which makes the
// scaled Hamiltonian E = p^2/2 + V with no stray factors.

#ifndef DARKPOT_MODEL_HPP
#define DARKPOT_MODEL_HPP

#include <cmath>
#include <stdexcept>

namespace darkpot {

/// Global scales of one experiment configuration (all ratios).
struct SystemParams {
    double omega_ratio = 1e-3;               ///< omega/Omega, potential vs preparation trap
    double d_bar = 1e6;                      ///< potential length scale d/x0
    double l_bar = 1e6;                      ///< fluctuation length scale l/x0
    double alpha_bound = 5.0;                ///< cap on |alpha2| along the orbit
    double t_gas_bar = 2.0 * M_PI * 1500.0;  ///< Omega * t_gas, protocol time budget

    void validate() const;

    /// Reduced-scale profile used by the grid quantum benchmark.
    static SystemParams desk_scale();
};

/// Member of the quartic family  V(u) = (omega/Omega)^2/2 * (a u^2 + b u^4 / (2 d^2)),
/// u = x - d0.  Optimization candidates have |a| = |b| = 1; a zero coefficient
/// is allowed only for internal reference cases (harmonic, free, pure quartic).
struct QuarticPotential {
    int a = -1;
    int b = 1;
    double d0_bar = 0.0;     ///< center offset d0/x0, >= 0
    double d_bar = 1e6;      ///< width d/x0
    double omega_ratio = 1e-3;

    void validate(bool candidate = false) const;

    /// DW/IDW/PQ/NQ candidate with center given as a fraction of d.
    static QuarticPotential candidate(int a, int b, double d0_over_d, const SystemParams& p);
};

/// White-noise strengths of the potential fluctuations plus a constant
/// background rate; all entries are dimensionless (S_j Omega, Gamma_0/Omega).
struct NoiseModel {
    double s1 = 0.0;         ///< position fluctuation strength S1*Omega
    double s2 = 0.0;         ///< amplitude fluctuation strength S2*Omega
    double l_bar = 1e6;      ///< fluctuation length scale l/x0
    double gamma0_bar = 0.0; ///< constant rate Gamma0/Omega

    void validate() const;
    bool quiet() const { return s1 == 0.0 && s2 == 0.0 && gamma0_bar == 0.0; }
};

/// Local Taylor data of the potential at a point, in the alpha_n convention
/// alpha_n = V^(n) x0^(n-2) / (m omega^2 (n-1)!).  Only n = 2, 3 enter the
/// propagated dynamics; the full quartic is used directly where needed.
struct TaylorCoefficients {
    double alpha2;
    double alpha3;
};

/// Scaled potential energy at x_bar.
double potential_value(const QuarticPotential& pot, double x_bar);

/// dV/dx_bar; the classical force is its negative.
double potential_gradient(const QuarticPotential& pot, double x_bar);

/// alpha2 = a + 3 b u^2/d^2,  alpha3 = 3 b u/d^2  at u = x_bar - d0_bar.
TaylorCoefficients taylor_coefficients(const QuarticPotential& pot, double x_bar);

/// Fluctuation-induced dephasing rate Gamma_f/Omega at a point:
///   (pi/2) (omega/Omega)^4 [ s1 l^2 alpha2^2 + s2 (a u + b u^3/d^2)^2 ].
/// The constant gamma0_bar is added by callers, not here.
double dephasing_rate(const QuarticPotential& pot, const NoiseModel& noise, double x_bar);

} // namespace darkpot

#endif
