#include "darkpot/model.hpp"

namespace darkpot {

void SystemParams::validate() const {
    if (!(omega_ratio > 0.0)) throw std::invalid_argument("SystemParams: omega_ratio must be > 0");
    if (!(d_bar > 0.0)) throw std::invalid_argument("SystemParams: d_bar must be > 0");
    if (!(l_bar > 0.0)) throw std::invalid_argument("SystemParams: l_bar must be > 0");
    if (!(alpha_bound > 0.0)) throw std::invalid_argument("SystemParams: alpha_bound must be > 0");
    if (!(t_gas_bar > 0.0)) throw std::invalid_argument("SystemParams: t_gas_bar must be > 0");
}

SystemParams SystemParams::desk_scale() {
    SystemParams p;
    p.omega_ratio = 0.05;
    p.d_bar = 64.0;
    p.l_bar = 64.0;
    return p;
}

void QuarticPotential::validate(bool candidate) const {
    if (a < -1 || a > 1 || b < -1 || b > 1)
        throw std::invalid_argument("QuarticPotential: a, b must be in {-1, 0, 1}");
    if (candidate && (a * a != 1 || b * b != 1))
        throw std::invalid_argument("QuarticPotential: candidates require |a| = |b| = 1");
    if (!(d0_bar >= 0.0)) throw std::invalid_argument("QuarticPotential: d0_bar must be >= 0");
    if (!(d_bar > 0.0)) throw std::invalid_argument("QuarticPotential: d_bar must be > 0");
    if (!(omega_ratio > 0.0)) throw std::invalid_argument("QuarticPotential: omega_ratio must be > 0");
}

QuarticPotential QuarticPotential::candidate(int a, int b, double d0_over_d, const SystemParams& p) {
    QuarticPotential pot;
    pot.a = a;
    pot.b = b;
    pot.d_bar = p.d_bar;
    pot.d0_bar = d0_over_d * p.d_bar;
    pot.omega_ratio = p.omega_ratio;
    pot.validate(true);
    return pot;
}

void NoiseModel::validate() const {
    if (!(s1 >= 0.0 && s2 >= 0.0 && gamma0_bar >= 0.0))
        throw std::invalid_argument("NoiseModel: strengths must be >= 0");
    if (!(l_bar > 0.0)) throw std::invalid_argument("NoiseModel: l_bar must be > 0");
}

double potential_value(const QuarticPotential& pot, double x_bar) {
    const double u = x_bar - pot.d0_bar;
    const double u2 = u * u;
    const double w2 = pot.omega_ratio * pot.omega_ratio;
    return 0.5 * w2 * (pot.a * u2 + 0.5 * pot.b * u2 * u2 / (pot.d_bar * pot.d_bar));
}

double potential_gradient(const QuarticPotential& pot, double x_bar) {
    const double u = x_bar - pot.d0_bar;
    const double w2 = pot.omega_ratio * pot.omega_ratio;
    return w2 * (pot.a * u + pot.b * u * u * u / (pot.d_bar * pot.d_bar));
}

TaylorCoefficients taylor_coefficients(const QuarticPotential& pot, double x_bar) {
    const double u = x_bar - pot.d0_bar;
    const double inv_d2 = 1.0 / (pot.d_bar * pot.d_bar);
    return {pot.a + 3.0 * pot.b * u * u * inv_d2, 3.0 * pot.b * u * inv_d2};
}

double dephasing_rate(const QuarticPotential& pot, const NoiseModel& noise, double x_bar) {
    const double u = x_bar - pot.d0_bar;
    const double inv_d2 = 1.0 / (pot.d_bar * pot.d_bar);
    const double alpha2 = pot.a + 3.0 * pot.b * u * u * inv_d2;
    const double slope = pot.a * u + pot.b * u * u * u * inv_d2;
    const double w2 = pot.omega_ratio * pot.omega_ratio;
    return 0.5 * M_PI * w2 * w2 *
           (noise.s1 * noise.l_bar * noise.l_bar * alpha2 * alpha2 + noise.s2 * slope * slope);
}

} // namespace darkpot
