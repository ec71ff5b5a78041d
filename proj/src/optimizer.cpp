#include "darkpot/optimizer.hpp"

#include <cmath>
#include <future>
#include <map>
#include <mutex>

#include "darkpot/cubicity.hpp"
#include "darkpot/gaussian.hpp"
#include "darkpot/threads.hpp"

namespace darkpot {

const char* merit_kind_name(MeritKind kind) {
    return kind == MeritKind::coherence_length ? "coherence_length" : "coherent_cubicity";
}

MeritKind merit_kind_from_name(const std::string& name) {
    if (name == "coherence_length") return MeritKind::coherence_length;
    if (name == "coherent_cubicity") return MeritKind::coherent_cubicity;
    throw std::invalid_argument("unknown merit kind: " + name);
}

void OptimizationProblem::validate() const {
    params.validate();
    noise.validate();
    if (!(d0_lo > 0.0 && d0_hi <= M_SQRT2 + 1e-12 && d0_lo < d0_hi))
        throw std::invalid_argument("OptimizationProblem: d0 range must lie in (0, sqrt(2)]");
    if (seeds < 1) throw std::invalid_argument("OptimizationProblem: seeds must be >= 1");
    if (!(local_tol > 0.0)) throw std::invalid_argument("OptimizationProblem: local_tol must be > 0");
}

CandidateEvaluation evaluate_candidate(const QuarticPotential& pot,
                                       const OptimizationProblem& problem) {
    CandidateEvaluation ev;
    try {
        const auto traj = integrate_trajectory(pot, problem.params, problem.rel_tol,
                                               problem.abs_tol);
        ev.constraints = constraint_report(traj, problem.params);
        ev.period_bar = traj.period_bar.value_or(0.0);
        ev.max_abs_alpha2 = traj.max_abs_alpha2;
        if (!ev.constraints.feasible()) {
            ev.diagnostic = "constraint violation";
            return ev;
        }
        const auto gauss = propagate_covariance(pot, problem.noise, traj, problem.rel_tol,
                                                problem.abs_tol);
        MeritPoint m;
        if (problem.merit_kind == MeritKind::coherence_length) {
            m = max_coherence_length(gauss);
        } else {
            const auto sym = propagate_symplectic(pot, traj, problem.rel_tol, problem.abs_tol);
            const auto trace = cubicity_trace(pot, traj, gauss, sym);
            m = coherent_cubicity_merit(trace);
        }
        ev.feasible = true;
        ev.merit = m.value;
        ev.argmax_tau = m.tau;
    } catch (const std::exception& e) {
        ev.feasible = false;
        ev.merit = -std::numeric_limits<double>::infinity();
        ev.diagnostic = e.what();
    }
    return ev;
}

namespace {

constexpr double kD0Quantum = 1e-12; // cache resolution on d0/d

// Deterministic compute-once cache keyed by (sign pair, quantized d0/d).
class EvalCache {
public:
    CandidateEvaluation get(int pair, double d0_over_d, const OptimizationProblem& problem) {
        const std::int64_t q = static_cast<std::int64_t>(std::llround(d0_over_d / kD0Quantum));
        const Key key{pair, q};
        std::shared_future<CandidateEvaluation> fut;
        std::shared_ptr<std::promise<CandidateEvaluation>> task;
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = entries_.find(key);
            if (it == entries_.end()) {
                task = std::make_shared<std::promise<CandidateEvaluation>>();
                fut = task->get_future().share();
                entries_.emplace(key, fut);
            } else {
                fut = it->second;
            }
        }
        if (task) {
            const double d0 = q * kD0Quantum;
            const auto pot = QuarticPotential::candidate(kSignPairs[pair][0], kSignPairs[pair][1],
                                                         d0, problem.params);
            task->set_value(evaluate_candidate(pot, problem));
        }
        return fut.get();
    }

    long size() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return static_cast<long>(entries_.size());
    }

private:
    struct Key {
        int pair;
        std::int64_t q;
        bool operator<(const Key& o) const { return pair != o.pair ? pair < o.pair : q < o.q; }
    };
    mutable std::mutex mutex_;
    std::map<Key, std::shared_future<CandidateEvaluation>> entries_;
};

double splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z = z ^ (z >> 31);
    return static_cast<double>(z >> 11) * 0x1.0p-53; // uniform in [0, 1)
}

struct AscentResult {
    double d0 = 0.0;
    double merit = -std::numeric_limits<double>::infinity();
    bool feasible = false;
    int iterations = 0;
};

// Trust-region ascent on the barrier-augmented merit for one seed.  The
// quadratic surrogate comes from a 3-point stencil; the barrier weight is
// reduced geometrically and the last sweep uses hard feasibility rejection
// so the iterate can ride onto an active constraint boundary.
AscentResult local_ascent(int pair, double seed_d0, const OptimizationProblem& problem,
                          EvalCache& cache) {
    const double lo = problem.d0_lo, hi = problem.d0_hi;
    const double range = hi - lo;

    auto barrier_value = [&](const CandidateEvaluation& ev, double mu) {
        if (!ev.feasible) return -std::numeric_limits<double>::infinity();
        if (mu == 0.0) return ev.merit;
        const double m_period = ev.constraints.period_margin / problem.params.t_gas_bar;
        const double m_curv = ev.constraints.curvature_margin / problem.params.alpha_bound;
        if (m_period <= 0.0 || m_curv <= 0.0)
            return -std::numeric_limits<double>::infinity();
        return ev.merit + mu * (std::log(m_period) + std::log(m_curv));
    };

    AscentResult res;
    res.d0 = seed_d0;

    auto seed_ev = cache.get(pair, seed_d0, problem);
    res.feasible = seed_ev.feasible;
    res.merit = seed_ev.merit;
    if (!seed_ev.feasible) return res;

    const double mu0 = 0.01 * (1.0 + std::fabs(seed_ev.merit));
    double theta = seed_d0;
    int iter = 0;

    for (int round = 0; round < 6 && iter < problem.max_iters; ++round) {
        const double mu = (round < 5) ? mu0 * std::pow(10.0, -round) : 0.0;
        double h = (round == 0) ? 0.05 * range : std::max(1e-3 * range, 32.0 * problem.local_tol);
        double f0 = barrier_value(cache.get(pair, theta, problem), mu);

        while (h >= problem.local_tol && iter < problem.max_iters) {
            ++iter;
            const double tm = std::max(lo, theta - h);
            const double tp = std::min(hi, theta + h);
            const double fm = (tm < theta) ? barrier_value(cache.get(pair, tm, problem), mu)
                                           : -std::numeric_limits<double>::infinity();
            const double fp = (tp > theta) ? barrier_value(cache.get(pair, tp, problem), mu)
                                           : -std::numeric_limits<double>::infinity();

            // quadratic surrogate through (tm, theta, tp) when all finite
            double cand = theta;
            double fcand = f0;
            if (std::isfinite(fm) && std::isfinite(fp) && std::isfinite(f0)) {
                const double dm = tm - theta, dp = tp - theta;
                const double denom = dm * dp * (dm - dp);
                if (denom != 0.0) {
                    const double aa = (dp * (fm - f0) - dm * (fp - f0)) / denom;
                    const double bb = (dm * dm * (fp - f0) - dp * dp * (fm - f0)) / denom;
                    if (aa < 0.0) {
                        double step = -bb / (2.0 * aa);
                        step = std::clamp(step, -h, h);
                        const double tq = std::clamp(theta + step, lo, hi);
                        if (tq != theta) {
                            const double fq = barrier_value(cache.get(pair, tq, problem), mu);
                            if (fq > fcand) {
                                cand = tq;
                                fcand = fq;
                            }
                        }
                    }
                }
            }
            if (fm > fcand) { cand = tm; fcand = fm; }
            if (fp > fcand) { cand = tp; fcand = fp; }

            if (fcand > f0 && cand != theta) {
                const bool at_edge = std::fabs(std::fabs(cand - theta) - h) < 1e-18 + 1e-12 * h;
                theta = cand;
                f0 = fcand;
                if (at_edge) h = std::min(1.6 * h, 0.25 * range);
            } else {
                h *= 0.4;
            }
        }
    }

    auto final_ev = cache.get(pair, theta, problem);
    res.d0 = theta;
    res.feasible = final_ev.feasible;
    res.merit = final_ev.merit;
    res.iterations = iter;
    return res;
}

} // namespace

OptimizationResult optimize(const OptimizationProblem& problem) {
    problem.validate();

    EvalCache cache;

    // per-pair seed lists, reproducible from rng_seed
    std::vector<std::pair<int, double>> work; // (pair, seed d0)
    for (int pair = 0; pair < 4; ++pair) {
        int count = problem.seeds / 4 + (pair < problem.seeds % 4 ? 1 : 0);
        std::uint64_t state = problem.rng_seed ^ (0xA0761D6478BD642Full * (pair + 1));
        for (int s = 0; s < count; ++s) {
            const double u = splitmix64(state);
            work.emplace_back(pair, problem.d0_lo + u * (problem.d0_hi - problem.d0_lo));
        }
    }

    std::vector<AscentResult> results(work.size());
    parallel_for(work.size(), [&](std::size_t i) {
        results[i] = local_ascent(work[i].first, work[i].second, problem, cache);
    });

    OptimizationResult out;
    out.rng_seed = problem.rng_seed;
    out.per_sign_best.resize(4);
    for (int pair = 0; pair < 4; ++pair) {
        out.per_sign_best[pair].a = kSignPairs[pair][0];
        out.per_sign_best[pair].b = kSignPairs[pair][1];
    }

    for (std::size_t i = 0; i < work.size(); ++i) {
        const int pair = work[i].first;
        const auto& r = results[i];
        auto& best = out.per_sign_best[pair];
        if (r.feasible &&
            (r.merit > best.merit || (r.merit == best.merit && r.d0 < best.d0_over_d) ||
             !best.feasible)) {
            best.feasible = true;
            best.d0_over_d = r.d0;
            best.merit = r.merit;
        }
        if (problem.keep_seed_history)
            out.seed_history.push_back({kSignPairs[pair][0], kSignPairs[pair][1], work[i].second,
                                        r.d0, r.merit, r.iterations});
    }

    int winner = -1;
    for (int pair = 0; pair < 4; ++pair) {
        auto& b = out.per_sign_best[pair];
        if (!b.feasible) continue;
        const auto ev = cache.get(pair, b.d0_over_d, problem);
        b.argmax_tau = ev.argmax_tau;
        b.period_bar = ev.period_bar;
        if (winner < 0 || b.merit > out.per_sign_best[winner].merit ||
            (b.merit == out.per_sign_best[winner].merit &&
             b.d0_over_d < out.per_sign_best[winner].d0_over_d))
            winner = pair;
    }
    if (winner < 0) throw std::runtime_error("optimize: no feasible candidate");

    const auto& w = out.per_sign_best[winner];
    out.best = QuarticPotential::candidate(w.a, w.b, w.d0_over_d, problem.params);
    const auto best_ev = cache.get(winner, w.d0_over_d, problem);
    out.merit_value = best_ev.merit;
    out.merit_time = best_ev.argmax_tau;
    out.feasibility = best_ev.constraints;
    out.evaluations = cache.size();
    return out;
}

} // namespace darkpot
