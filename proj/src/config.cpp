#include "darkpot/config.hpp"

#include <fstream>

namespace darkpot {

using nlohmann::json;

json RunConfig::default_json() {
    return RunConfig{}.to_json();
}

json RunConfig::to_json() const {
    json j;
    j["system"] = {{"omega_ratio", system.omega_ratio},
                   {"d_bar", system.d_bar},
                   {"l_bar", system.l_bar},
                   {"alpha_bound", system.alpha_bound},
                   {"t_gas_bar", system.t_gas_bar}};
    j["noise"] = {{"s1", noise.s1}, {"s2", noise.s2}, {"gamma0_bar", noise.gamma0_bar}};
    j["optimize"] = {{"merit", merit_kind_name(merit)},
                     {"d0_range", json::array({d0_lo, d0_hi})},
                     {"seeds", seeds},
                     {"local_tol", local_tol},
                     {"max_iters", max_iters}};
    j["grid"] = {{"n_points", grid.n_points},
                 {"x_min_bar", grid.x_min_bar},
                 {"x_max_bar", grid.x_max_bar},
                 {"dt_bar", grid.dt_bar},
                 {"store_every", grid.store_every}};
    j["integrator"] = {{"rel_tol", rel_tol}, {"abs_tol", abs_tol}};
    j["rng_seed"] = rng_seed;
    j["output_dir"] = output_dir;
    return j;
}

namespace {

void reject_unknown(const json& doc, const json& model, const std::string& prefix) {
    if (!doc.is_object()) throw std::invalid_argument("config: expected object at " + prefix);
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (!model.contains(it.key()))
            throw std::invalid_argument("config: unknown key '" + prefix + it.key() + "'");
        if (model[it.key()].is_object()) reject_unknown(it.value(), model[it.key()], prefix + it.key() + ".");
    }
}

template <class T>
void read(const json& doc, const char* section, const char* key, T& out) {
    if (doc.contains(section) && doc[section].contains(key)) out = doc[section][key].get<T>();
}

} // namespace

RunConfig RunConfig::from_json(const json& doc) {
    RunConfig cfg;
    reject_unknown(doc, default_json(), "");

    read(doc, "system", "omega_ratio", cfg.system.omega_ratio);
    read(doc, "system", "d_bar", cfg.system.d_bar);
    read(doc, "system", "l_bar", cfg.system.l_bar);
    read(doc, "system", "alpha_bound", cfg.system.alpha_bound);
    read(doc, "system", "t_gas_bar", cfg.system.t_gas_bar);

    read(doc, "noise", "s1", cfg.noise.s1);
    read(doc, "noise", "s2", cfg.noise.s2);
    read(doc, "noise", "gamma0_bar", cfg.noise.gamma0_bar);
    cfg.noise.l_bar = cfg.system.l_bar;

    if (doc.contains("optimize")) {
        const auto& o = doc["optimize"];
        if (o.contains("merit")) cfg.merit = merit_kind_from_name(o["merit"].get<std::string>());
        if (o.contains("d0_range")) {
            const auto& r = o["d0_range"];
            if (!r.is_array() || r.size() != 2)
                throw std::invalid_argument("config: optimize.d0_range must be [lo, hi]");
            cfg.d0_lo = r[0].get<double>();
            cfg.d0_hi = r[1].get<double>();
        }
        if (o.contains("seeds")) cfg.seeds = o["seeds"].get<int>();
        if (o.contains("local_tol")) cfg.local_tol = o["local_tol"].get<double>();
        if (o.contains("max_iters")) cfg.max_iters = o["max_iters"].get<int>();
    }

    read(doc, "grid", "n_points", cfg.grid.n_points);
    read(doc, "grid", "x_min_bar", cfg.grid.x_min_bar);
    read(doc, "grid", "x_max_bar", cfg.grid.x_max_bar);
    read(doc, "grid", "dt_bar", cfg.grid.dt_bar);
    read(doc, "grid", "store_every", cfg.grid.store_every);

    read(doc, "integrator", "rel_tol", cfg.rel_tol);
    read(doc, "integrator", "abs_tol", cfg.abs_tol);

    if (doc.contains("rng_seed")) cfg.rng_seed = doc["rng_seed"].get<std::uint64_t>();
    if (doc.contains("output_dir")) cfg.output_dir = doc["output_dir"].get<std::string>();

    cfg.system.validate();
    cfg.noise.validate();
    return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
    if (path.empty()) return RunConfig{};
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("config: cannot open " + path);
    json doc = json::parse(is);
    return from_json(doc);
}

OptimizationProblem RunConfig::optimization_problem() const {
    OptimizationProblem p;
    p.merit_kind = merit;
    p.noise = noise;
    p.params = system;
    p.d0_lo = d0_lo;
    p.d0_hi = d0_hi;
    p.seeds = seeds;
    p.local_tol = local_tol;
    p.max_iters = max_iters;
    p.rel_tol = rel_tol;
    p.abs_tol = abs_tol;
    p.rng_seed = rng_seed;
    return p;
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("override must look like path.to.key=value: " + assignment);
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);

    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw; // plain string
    }

    json* node = &doc;
    std::size_t pos = 0;
    for (;;) {
        const auto dot = path.find('.', pos);
        const std::string key = path.substr(pos, dot == std::string::npos ? dot : dot - pos);
        if (!node->contains(key))
            throw std::invalid_argument("override: unknown key '" + path + "'");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        pos = dot + 1;
    }
}

} // namespace darkpot
