#include "darkpot/qsim.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "darkpot/csv.hpp"

namespace darkpot {

namespace detail {

// Row and column transforms over an n x n complex array, planned once.
// Plans use FFTW_UNALIGNED so they can run on any buffer of the right shape.
struct FftwPlans {
    int n;
    fftw_plan rows_fwd, rows_bwd, cols_fwd, cols_bwd, line_fwd;

    explicit FftwPlans(int n_) : n(n_) {
        std::vector<std::complex<double>> scratch(static_cast<std::size_t>(n) * n);
        auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
        const unsigned flags = (n >= 512 ? FFTW_MEASURE : FFTW_ESTIMATE) | FFTW_UNALIGNED;
        rows_fwd = fftw_plan_many_dft(1, &n, n, p, nullptr, 1, n, p, nullptr, 1, n,
                                      FFTW_FORWARD, flags);
        rows_bwd = fftw_plan_many_dft(1, &n, n, p, nullptr, 1, n, p, nullptr, 1, n,
                                      FFTW_BACKWARD, flags);
        cols_fwd = fftw_plan_many_dft(1, &n, n, p, nullptr, n, 1, p, nullptr, n, 1,
                                      FFTW_FORWARD, flags);
        cols_bwd = fftw_plan_many_dft(1, &n, n, p, nullptr, n, 1, p, nullptr, n, 1,
                                      FFTW_BACKWARD, flags);
        line_fwd = fftw_plan_many_dft(1, &n, 1, p, nullptr, 1, n, p, nullptr, 1, n,
                                      FFTW_FORWARD, flags);
        if (!rows_fwd || !rows_bwd || !cols_fwd || !cols_bwd || !line_fwd)
            throw std::runtime_error("FftwPlans: planning failed");
    }
    ~FftwPlans() {
        fftw_destroy_plan(rows_fwd);
        fftw_destroy_plan(rows_bwd);
        fftw_destroy_plan(cols_fwd);
        fftw_destroy_plan(cols_bwd);
        fftw_destroy_plan(line_fwd);
    }

    void execute(fftw_plan plan, std::complex<double>* data) const {
        auto* p = reinterpret_cast<fftw_complex*>(data);
        fftw_execute_dft(plan, p, p);
    }
};

} // namespace detail

void GridSpec::validate() const {
    if (n_points < 8 || (n_points & (n_points - 1)) != 0)
        throw std::invalid_argument("GridSpec: n_points must be a power of two >= 8");
    if (!(x_max_bar > x_min_bar)) throw std::invalid_argument("GridSpec: empty box");
    if (!(dt_bar > 0.0)) throw std::invalid_argument("GridSpec: dt_bar must be > 0");
    if (store_every < 1) throw std::invalid_argument("GridSpec: store_every must be >= 1");
}

GridSpec grid_for_orbit(const QuarticPotential& pot, const SystemParams& params,
                        const GridSpec& base, double margin) {
    const auto traj = integrate_trajectory(pot, params);
    const double horizon = traj.period_bar.value_or(traj.dense->t_end());
    double lo = 0.0, hi = 0.0;
    const int scan = 8192;
    for (int i = 0; i <= scan; ++i) {
        const double x = traj.x_at(horizon * i / scan);
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    GridSpec g = base;
    g.x_min_bar = lo - margin;
    g.x_max_bar = hi + margin;
    g.validate();
    return g;
}

double DensityMatrixGrid::trace() const {
    double t = 0.0;
    for (int i = 0; i < n(); ++i) t += at(i, i).real();
    return t;
}

double DensityMatrixGrid::purity() const {
    double s = 0.0;
    for (const auto& v : values) s += std::norm(v);
    return s;
}

double DensityMatrixGrid::hermiticity_error() const {
    double m = 0.0;
    for (int i = 0; i < n(); ++i)
        for (int j = i; j < n(); ++j)
            m = std::max(m, std::abs(at(i, j) - std::conj(at(j, i))));
    return m;
}

double DensityMatrixGrid::mean_x() const {
    double s = 0.0;
    for (int i = 0; i < n(); ++i) s += grid.x_at(i) * at(i, i).real();
    return s;
}

double DensityMatrixGrid::variance_x() const {
    const double m = mean_x();
    double s = 0.0;
    for (int i = 0; i < n(); ++i) {
        const double d = grid.x_at(i) - m;
        s += d * d * at(i, i).real();
    }
    return s;
}

DensityMatrixGrid initial_ground_state(const GridSpec& grid) {
    grid.validate();
    // psi(x) = (2 pi)^(-1/4) exp(-x^2/4): unit position variance in x0 units
    const double tail = std::exp(-0.5 * std::min(grid.x_min_bar * grid.x_min_bar,
                                                 grid.x_max_bar * grid.x_max_bar));
    if (grid.x_min_bar > 0.0 || grid.x_max_bar < 0.0 || tail > 1e-16)
        throw std::invalid_argument(
            "initial_ground_state: box does not contain the ground state tail below 1e-16");

    const int n = grid.n_points;
    std::vector<double> psi(n);
    for (int i = 0; i < n; ++i) psi[i] = std::exp(-0.25 * grid.x_at(i) * grid.x_at(i));

    DensityMatrixGrid rho;
    rho.grid = grid;
    rho.values.resize(static_cast<std::size_t>(n) * n);
    double norm = 0.0;
    for (int i = 0; i < n; ++i) norm += psi[i] * psi[i];
    const double scale = 1.0 / norm; // fixes the discrete trace to 1 exactly
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) rho.at(i, j) = psi[i] * psi[j] * scale;
    return rho;
}

SplitStepPropagator::SplitStepPropagator(const QuarticPotential& pot, const GridSpec& grid)
    : grid_(grid), plans_(std::make_unique<detail::FftwPlans>(grid.n_points)) {
    grid_.validate();
    const int n = grid.n_points;
    const double dx = grid.dx();
    const double dk = 2.0 * M_PI / (n * dx);
    kinetic_phase_.resize(n);
    for (int j = 0; j < n; ++j) {
        const int f = (j <= n / 2) ? j : j - n; // signed FFT frequency index
        const double k = f * dk;
        kinetic_phase_[j] = k * k * 0.5 * grid.dt_bar; // half-step phase
    }
    potential_.resize(n);
    x_.resize(n);
    double vmin = 0.0, vmax = 0.0;
    for (int i = 0; i < n; ++i) {
        x_[i] = grid.x_at(i);
        potential_[i] = 0.5 * potential_value(pot, x_[i]); // V/(hbar Omega)
        vmin = std::min(vmin, potential_[i]);
        vmax = std::max(vmax, potential_[i]);
    }
    if ((vmax - vmin) * grid.dt_bar >= 0.5)
        throw std::invalid_argument(
            "SplitStepPropagator: potential phase per step exceeds 0.5 rad, reduce dt_bar");
}

SplitStepPropagator::~SplitStepPropagator() = default;

void SplitStepPropagator::advance(DensityMatrixGrid& rho, double gamma_bar) const {
    const int n = grid_.n_points;
    auto* data = rho.values.data();
    const double dt = grid_.dt_bar;

    // half kinetic: forward FFT on both indices, phase exp(-i(k_i^2-k_j^2)dt/2),
    // inverse FFTs, 1/n^2 normalization.  k^2 is even in the frequency index,
    // so the same phase table serves both transform conventions.
    auto half_kinetic = [&]() {
        plans_->execute(plans_->rows_fwd, data);
        plans_->execute(plans_->cols_fwd, data);
        const double inv_n2 = 1.0 / (static_cast<double>(n) * n);
        for (int i = 0; i < n; ++i) {
            const double ki = kinetic_phase_[i];
            auto* row = data + static_cast<std::size_t>(i) * n;
            for (int j = 0; j < n; ++j) {
                const double ph = -(ki - kinetic_phase_[j]);
                row[j] *= std::polar(inv_n2, ph);
            }
        }
        plans_->execute(plans_->rows_bwd, data);
        plans_->execute(plans_->cols_bwd, data);
    };

    half_kinetic();
    for (int i = 0; i < n; ++i) {
        auto* row = data + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            const double dv = (potential_[i] - potential_[j]) * dt;
            row[j] *= std::polar(1.0, -dv);
        }
    }
    half_kinetic();
    if (gamma_bar != 0.0) {
        for (int i = 0; i < n; ++i) {
            auto* row = data + static_cast<std::size_t>(i) * n;
            for (int j = 0; j < n; ++j) {
                const double sep = x_[i] - x_[j];
                row[j] *= std::exp(-0.5 * gamma_bar * sep * sep * dt);
            }
        }
    }
}

DensityMatrixGrid step(const DensityMatrixGrid& rho, const QuarticPotential& pot,
                       double gamma_bar_at_t, const GridSpec& grid) {
    SplitStepPropagator prop(pot, grid);
    DensityMatrixGrid out = rho;
    prop.advance(out, gamma_bar_at_t);
    return out;
}

WignerGrid wigner_transform(const DensityMatrixGrid& rho) {
    const int n = rho.n();
    const double dx = rho.grid.dx();
    const double dk = 2.0 * M_PI / (n * dx);

    detail::FftwPlans plans(n);
    std::vector<std::complex<double>> line(n);

    WignerGrid w;
    w.n = n;
    w.x_min = rho.grid.x_min_bar;
    w.x_max = rho.grid.x_max_bar;
    w.p_min = -0.5 * n * dk;
    w.p_max = 0.5 * n * dk;
    w.values.assign(static_cast<std::size_t>(n) * n, 0.0);

    // W(x_i, p) = (1/2pi) sum_m rho(x_i + m dx, x_i - m dx) e^{-i p m dx};
    // the offsets m land on stored lattice sites for every center i.
    for (int i = 0; i < n; ++i) {
        std::fill(line.begin(), line.end(), std::complex<double>(0.0, 0.0));
        const int reach = std::min(i, n - 1 - i);
        for (int m = -reach; m <= reach; ++m)
            line[(m + n) % n] = rho.at(i + m, i - m);
        plans.execute(plans.line_fwd, line.data());
        auto* out = w.values.data() + static_cast<std::size_t>(i) * n;
        for (int k = 0; k < n; ++k) {
            const int j = (k - n / 2 + n) % n; // shift so column 0 is p_min
            out[k] = line[j].real() / (2.0 * M_PI);
        }
    }

    w.negativity_volume = negativity_volume(w);
    return w;
}

double negativity_volume(const WignerGrid& w) {
    double abs_sum = 0.0;
    for (double v : w.values) abs_sum += std::fabs(v);
    const double cell = 2.0 * M_PI / w.n; // dx * dp for this transform
    double nv = abs_sum * cell - 1.0;
    if (nv < 0.0 && nv > -1e-8) nv = 0.0;
    return nv;
}

PhaseSpaceMoments wigner_moments(const WignerGrid& w) {
    const int n = w.n;
    const double dx = (w.x_max - w.x_min) / n;
    const double dp = (w.p_max - w.p_min) / n;
    const double cell = dx * dp;
    PhaseSpaceMoments m;
    double mass = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = w.x_min + i * dx;
        const double* row = w.values.data() + static_cast<std::size_t>(i) * n;
        for (int k = 0; k < n; ++k) {
            const double p = w.p_min + k * dp;
            const double v = row[k] * cell;
            mass += v;
            m.mean_x += x * v;
            m.mean_p += p * v;
        }
    }
    m.mean_x /= mass;
    m.mean_p /= mass;
    for (int i = 0; i < n; ++i) {
        const double x = w.x_min + i * dx - m.mean_x;
        const double* row = w.values.data() + static_cast<std::size_t>(i) * n;
        for (int k = 0; k < n; ++k) {
            const double p = w.p_min + k * dp - m.mean_p;
            const double v = row[k] * cell / mass;
            m.cxx += x * x * v;
            m.cxp += x * p * v;
            m.cpp += p * p * v;
        }
    }
    return m;
}

std::vector<NegativitySample> simulate_negativity_trace(const QuarticPotential& pot,
                                                        const NoiseModel& noise,
                                                        const SystemParams& params,
                                                        const GridSpec& grid,
                                                        const std::vector<double>& sample_times_in) {
    auto sample_times = sample_times_in;
    std::sort(sample_times.begin(), sample_times.end());
    const auto traj = integrate_trajectory(pot, params);
    SplitStepPropagator prop(pot, grid);
    auto rho = initial_ground_state(grid);

    std::vector<NegativitySample> out;
    out.reserve(sample_times.size());
    auto record = [&](double tau) {
        auto w = wigner_transform(rho);
        out.push_back({tau, w.negativity_volume, rho.purity(), std::fabs(rho.trace() - 1.0)});
    };

    const double dt = grid.dt_bar;
    double tau = 0.0;
    std::size_t next = 0;
    long steps_since_check = 0;
    while (next < sample_times.size() && sample_times[next] <= 0.5 * dt) {
        record(0.0);
        ++next;
    }
    const double horizon = traj.dense->t_end();
    while (next < sample_times.size()) {
        const double gamma =
            dephasing_rate(pot, noise, traj.x_at(std::min(tau + 0.5 * dt, horizon))) +
            noise.gamma0_bar;
        prop.advance(rho, gamma);
        tau += dt;
        if (++steps_since_check >= 1000) {
            if (std::fabs(rho.trace() - 1.0) > 1e-6)
                throw std::runtime_error(
                    "simulate_negativity_trace: trace drift beyond 1e-6, reduce dt_bar");
            steps_since_check = 0;
        }
        while (next < sample_times.size() && sample_times[next] <= tau + 0.5 * dt) {
            record(tau);
            ++next;
        }
    }
    return out;
}

void write_wigner_snapshot(const std::string& path_base, const WignerGrid& w, double tau) {
    {
        std::ofstream os(path_base + ".bin", std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("write_wigner_snapshot: cannot open " + path_base);
        os.write(reinterpret_cast<const char*>(w.values.data()),
                 static_cast<std::streamsize>(w.values.size() * sizeof(double)));
    }
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "{\"n\": %d, \"x_min\": %.17g, \"x_max\": %.17g, \"p_min\": %.17g, "
                  "\"p_max\": %.17g, \"tau\": %.17g}\n",
                  w.n, w.x_min, w.x_max, w.p_min, w.p_max, tau);
    atomic_write(path_base + ".json", buf);
}

} // namespace darkpot
