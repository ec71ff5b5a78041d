#include "darkpot/csv.hpp"

#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

namespace darkpot {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

void row(std::ostream& os, std::initializer_list<double> vals) {
    bool first = true;
    for (double v : vals) {
        if (!first) os << ',';
        os << format_double(v);
        first = false;
    }
    os << '\n';
}

} // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const NoiseModel& noise) {
    os << "tau,x_bar,p_bar,alpha2,alpha3,gamma_f_bar\n";
    for (const auto& s : traj.samples) {
        const auto tc = taylor_coefficients(traj.pot, s.x_bar);
        const double g = dephasing_rate(traj.pot, noise, s.x_bar);
        row(os, {s.tau, s.x_bar, s.p_bar, tc.alpha2, tc.alpha3, g});
    }
}

void write_gaussian_csv(std::ostream& os, const GaussianTrace& trace) {
    os << "tau,cxx,cxp,cpp,lambda_minus,lambda_plus,theta,purity,xi_bar\n";
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        const auto& c = trace.states[i];
        row(os, {trace.times[i], c.cxx, c.cxp, c.cpp, trace.lambda_minus[i],
                 trace.lambda_plus[i], trace.theta[i], trace.purity[i],
                 trace.coherence_length[i]});
    }
}

void write_cubicity_csv(std::ostream& os, const CubicityTrace& trace) {
    os << "tau,eta,phi,beta,beta_s,beta_c,kappa,K\n";
    for (std::size_t i = 0; i < trace.times.size(); ++i)
        row(os, {trace.times[i], trace.eta[i], trace.phi[i], trace.beta[i], trace.beta_s[i],
                 trace.beta_c[i], trace.kappa[i], trace.coherent_cubicity[i]});
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::random_device rd;
    auto tmp = path;
    tmp += ".tmp" + std::to_string(rd() % 1000000);
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("atomic_write: cannot open " + tmp.string());
        os << content;
        if (!os.flush()) throw std::runtime_error("atomic_write: write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

} // namespace darkpot
