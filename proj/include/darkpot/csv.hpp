// CSV export of the trace types and atomic file writing.  Values are printed
// with 17 significant digits so files round-trip losslessly.

#ifndef DARKPOT_CSV_HPP
#define DARKPOT_CSV_HPP

#include <filesystem>
#include <ostream>
#include <string>

#include "darkpot/classical.hpp"
#include "darkpot/cubicity.hpp"
#include "darkpot/gaussian.hpp"

namespace darkpot {

// header: tau,x_bar,p_bar,alpha2,alpha3,gamma_f_bar
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const NoiseModel& noise);

// header: tau,cxx,cxp,cpp,lambda_minus,lambda_plus,theta,purity,xi_bar
void write_gaussian_csv(std::ostream& os, const GaussianTrace& trace);

// header: tau,eta,phi,beta,beta_s,beta_c,kappa,K
void write_cubicity_csv(std::ostream& os, const CubicityTrace& trace);

std::string format_double(double v);

/// Write `content` to `path` via a temporary file plus rename.
void atomic_write(const std::filesystem::path& path, const std::string& content);

} // namespace darkpot

#endif
