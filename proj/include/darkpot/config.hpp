// Run configuration: one JSON document covering system scales, noise,
// optimizer settings, and the quantum-benchmark grid, with full defaults and
// dotted-path overrides.  Unknown keys are rejected.

#ifndef DARKPOT_CONFIG_HPP
#define DARKPOT_CONFIG_HPP

#include <cstdint>
#include <string>

#include <json.hpp>

#include "darkpot/model.hpp"
#include "darkpot/optimizer.hpp"
#include "darkpot/qsim.hpp"

namespace darkpot {

struct RunConfig {
    SystemParams system;
    NoiseModel noise;
    MeritKind merit = MeritKind::coherence_length;
    double d0_lo = 0.005;
    double d0_hi = M_SQRT2;
    int seeds = 2000;
    double local_tol = 1e-6;
    int max_iters = 1000;
    GridSpec grid;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    std::uint64_t rng_seed = 0;
    std::string output_dir = "out";

    /// Defaults document (all keys present).
    static nlohmann::json default_json();

    /// Parse and validate; throws std::invalid_argument on unknown keys or
    /// schema violations.
    static RunConfig from_json(const nlohmann::json& doc);

    /// Load from a file, or defaults when path is empty.
    static RunConfig load(const std::string& path);

    nlohmann::json to_json() const;

    OptimizationProblem optimization_problem() const;
};

/// Apply one `path.to.key=value` override onto a JSON document.  The value
/// is parsed as JSON when possible, else taken as a string.  The key path
/// must already exist (overrides cannot invent keys).
void apply_override(nlohmann::json& doc, const std::string& assignment);

} // namespace darkpot

#endif
