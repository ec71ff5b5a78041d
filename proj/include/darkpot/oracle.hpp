// Self-check suite: closed-form reference solutions (free, static-trap,
// inverted-harmonic covariances, dephasing prefactor, period quadrature,
// symplectic determinant, Wigner marginals) evaluated against the live
// implementation.

#ifndef DARKPOT_ORACLE_HPP
#define DARKPOT_ORACLE_HPP

#include <string>
#include <vector>

namespace darkpot {

struct OracleCheck {
    std::string name;
    double error = 0.0;     // worst relative error observed
    double tolerance = 0.0;
    bool pass = false;
};

/// Fault-injection hooks for testing that the suite actually detects broken
/// constants; all 1.0 in normal operation.
struct OracleTweaks {
    double dephasing_prefactor_scale = 1.0;
    double tolerance_scale = 1.0;
};

std::vector<OracleCheck> run_oracle_suite(const OracleTweaks& tweaks = {});

} // namespace darkpot

#endif
