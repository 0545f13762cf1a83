// Experiment execution over the inference engines: Monte Carlo mistake
// curves, exact-forward mistake curves, per-trajectory invariant enforcement
// and the lagged imitation check along observation edges.
//
// Monte Carlo determinism: trials are partitioned into fixed blocks by trial
// index; every trial derives its own substreams from (seed, trial index);
// workers claim whole blocks and block results are merged in block order.
// The outcome is therefore byte-identical for any worker count.
#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <memory>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "netlearn/beliefs.hpp"
#include "netlearn/common.hpp"
#include "netlearn/curve.hpp"
#include "netlearn/engine_factorized.hpp"
#include "netlearn/engine_generic.hpp"
#include "netlearn/engine_star.hpp"
#include "netlearn/network.hpp"
#include "netlearn/rng.hpp"
#include "netlearn/signal_model.hpp"
#include "netlearn/theory.hpp"

namespace netlearn {

enum class EngineChoice { automatic, generic, factorized, star };
enum class EngineKind { generic, factorized, star };

inline const char* to_string(EngineKind k) {
    switch (k) {
        case EngineKind::generic: return "generic";
        case EngineKind::factorized: return "factorized";
        case EngineKind::star: return "star";
    }
    return "?";
}

inline const char* to_string(EngineChoice c) {
    switch (c) {
        case EngineChoice::automatic: return "auto";
        case EngineChoice::generic: return "generic";
        case EngineChoice::factorized: return "factorized";
        case EngineChoice::star: return "star";
    }
    return "?";
}

inline EngineChoice engine_choice_from_string(const std::string& s) {
    if (s == "auto") return EngineChoice::automatic;
    if (s == "generic") return EngineChoice::generic;
    if (s == "factorized") return EngineChoice::factorized;
    if (s == "star") return EngineChoice::star;
    throw ConfigError("unknown engine '" + s + "'");
}

// `auto` picks the cheapest engine whose preconditions the instance meets.
inline EngineKind resolve_engine(EngineChoice choice, const SignalModel& model,
                                 const Network& net) {
    switch (choice) {
        case EngineChoice::generic: return EngineKind::generic;
        case EngineChoice::factorized: return EngineKind::factorized;
        case EngineChoice::star: return EngineKind::star;
        case EngineChoice::automatic: break;
    }
    if (model.is_stationary_binary()) {
        if (net.is_complete()) return EngineKind::factorized;
        if (net.star_center() >= 0) return EngineKind::star;
    }
    return EngineKind::generic;
}

// Type-erased engine with reusable per-worker scratch space.
class EngineHandle {
public:
    using Scratch =
        std::variant<std::monostate, FactorizedCompleteEngine::Scratch, StarEngine::Scratch>;

    EngineHandle(const SignalModel& model, const Network& net, std::size_t T, EngineKind kind,
                 TieRule tie = {}, std::uint64_t enum_budget = kDefaultEnumBudget)
        : kind_(kind) {
        switch (kind) {
            case EngineKind::generic:
                impl_.emplace<GenericEngine>(model, net, T, enum_budget, tie);
                break;
            case EngineKind::factorized:
                impl_.emplace<FactorizedCompleteEngine>(model, net, T, tie);
                break;
            case EngineKind::star:
                impl_.emplace<StarEngine>(model, net, T, tie);
                break;
        }
    }

    EngineKind kind() const { return kind_; }

    Scratch make_scratch() const {
        if (const auto* f = std::get_if<FactorizedCompleteEngine>(&impl_))
            return f->make_scratch();
        if (const auto* s = std::get_if<StarEngine>(&impl_)) return s->make_scratch();
        return std::monostate{};
    }

    void run_into(const SignalMatrix& signals, State theta, TrajectoryRecord& rec,
                  Scratch& scratch) const {
        if (const auto* f = std::get_if<FactorizedCompleteEngine>(&impl_))
            f->run_into(signals, theta, rec, std::get<FactorizedCompleteEngine::Scratch>(scratch));
        else if (const auto* s = std::get_if<StarEngine>(&impl_))
            s->run_into(signals, theta, rec, std::get<StarEngine::Scratch>(scratch));
        else
            std::get<GenericEngine>(impl_).run_into(signals, theta, rec);
    }

    const GenericEngine& generic() const { return std::get<GenericEngine>(impl_); }
    const FactorizedCompleteEngine& factorized() const {
        return std::get<FactorizedCompleteEngine>(impl_);
    }

private:
    EngineKind kind_;
    std::variant<std::monostate, GenericEngine, FactorizedCompleteEngine, StarEngine> impl_;
};

// ---------------------------------------------------------------------------
// Trajectory invariants
// ---------------------------------------------------------------------------

struct InvariantViolation {
    std::string what;
    std::uint64_t trial = 0;
    std::size_t agent = 0;
    std::size_t period = 0; // 1-based
    double value = 0.0;
    double bound = 0.0;
    TrajectoryRecord trajectory;
};

struct InvariantReport {
    std::uint64_t trajectories = 0;
    std::uint64_t cells = 0;
    std::vector<InvariantViolation> violations;

    bool ok() const { return violations.empty(); }
};

// Checks, for every agent and period of one trajectory:
//   decomposition   |L - (S + P)| <= 1e-9
//   private bound   |P| <= M * t + 1e-9
//   posterior link  |p - sigmoid(L)| <= 1e-12
//   action          recorded action equals the myopic action of the belief
template <typename OnViolation>
inline std::uint64_t check_trajectory_invariants(const TrajectoryRecord& rec, double M,
                                                 TieRule tie, const OnViolation& on_violation) {
    std::uint64_t cells = 0;
    for (std::size_t i = 0; i < rec.n; ++i) {
        for (std::size_t t = 1; t <= rec.horizon; ++t) {
            ++cells;
            const BeliefState& b = rec.belief(i, t - 1);
            const double decomp = std::abs(b.L - (b.S + b.P));
            if (decomp > kLlrTol)
                on_violation("decomposition L = S + P", i, t, decomp, kLlrTol);
            const double pbound = M * static_cast<double>(t) + kLlrTol;
            if (std::abs(b.P) > pbound)
                on_violation("private likelihood bound |P| <= M t", i, t, std::abs(b.P), pbound);
            if (std::abs(b.p - sigmoid(b.L)) > 1e-12)
                on_violation("posterior probability matches log-odds", i, t,
                             std::abs(b.p - sigmoid(b.L)), 1e-12);
            if (rec.action(i, t - 1) != action_from_llr(b.L, tie))
                on_violation("recorded action is the myopic action", i, t, b.L, 0.0);
        }
    }
    return cells;
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

struct MonteCarloOptions {
    std::uint64_t trials = 10000;
    std::uint64_t seed = 1;
    unsigned threads = 0;    // 0: hardware concurrency
    std::size_t blocks = 100; // trial blocks (bootstrap resampling units)
    bool collect_violations = false;
    TieRule tie{};
    std::uint64_t enum_budget = kDefaultEnumBudget;
};

struct MonteCarloResult {
    MistakeCurve curve;
    InvariantReport invariants;
    EngineKind engine = EngineKind::generic;
};

inline unsigned effective_threads(unsigned requested, std::size_t jobs) {
    unsigned t = requested != 0 ? requested : std::thread::hardware_concurrency();
    if (t == 0) t = 1;
    return static_cast<unsigned>(std::min<std::size_t>(t, jobs));
}

inline MonteCarloResult run_monte_carlo(const SignalModel& model, const Network& net,
                                        std::size_t T, EngineChoice choice,
                                        const MonteCarloOptions& opt) {
    if (opt.trials < 1) throw ConfigError("run_monte_carlo: need trials >= 1");
    const std::size_t n = net.size();
    const EngineKind kind = resolve_engine(choice, model, net);
    const EngineHandle engine(model, net, T, kind, opt.tie, opt.enum_budget);
    const double M = model.bound_M();

    const std::size_t B = std::min<std::size_t>(opt.blocks, opt.trials);
    const std::uint64_t per = opt.trials / B, extra = opt.trials % B;

    std::vector<BlockCounts> block_results(B);
    std::vector<std::vector<InvariantViolation>> block_violations(B);
    std::vector<std::uint64_t> block_cells(B, 0);
    std::vector<std::exception_ptr> block_errors(B);

    std::atomic<std::size_t> next_block{0};
    auto worker = [&]() {
        EngineHandle::Scratch scratch = engine.make_scratch();
        TrajectoryRecord rec;
        SignalMatrix signals;
        for (;;) {
            const std::size_t b = next_block.fetch_add(1);
            if (b >= B) break;
            try {
                const std::uint64_t lo = b * per + std::min<std::uint64_t>(b, extra);
                const std::uint64_t hi = lo + per + (b < extra ? 1 : 0);
                BlockCounts bc;
                bc.mistakes_g.assign(n * T, 0);
                bc.mistakes_b.assign(n * T, 0);
                for (std::uint64_t trial = lo; trial < hi; ++trial) {
                    const std::uint64_t ts = trial_seed(opt.seed, trial);
                    const State theta =
                        state_stream(ts).bernoulli(0.5) ? State::g : State::b;
                    sample_signals_into(model, theta, n, T, ts, signals);
                    engine.run_into(signals, theta, rec, scratch);

                    auto& mist = theta == State::g ? bc.mistakes_g : bc.mistakes_b;
                    (theta == State::g ? bc.trials_g : bc.trials_b) += 1;
                    const Action correct = matching_action(theta);
                    for (std::size_t k = 0; k < n * T; ++k)
                        if (rec.actions[k] != correct) ++mist[k];

                    block_cells[b] += check_trajectory_invariants(
                        rec, M, opt.tie,
                        [&](const char* what, std::size_t agent, std::size_t period,
                            double value, double bound) {
                            if (!opt.collect_violations)
                                throw InvariantViolationError(
                                    std::string("trajectory invariant violated: ") + what +
                                    " at trial " + std::to_string(trial) + ", agent " +
                                    std::to_string(agent + 1) + ", t=" + std::to_string(period) +
                                    " (value " + std::to_string(value) + ", bound " +
                                    std::to_string(bound) + ")");
                            InvariantViolation v;
                            v.what = what;
                            v.trial = trial;
                            v.agent = agent;
                            v.period = period;
                            v.value = value;
                            v.bound = bound;
                            v.trajectory = rec;
                            block_violations[b].push_back(std::move(v));
                        });
                }
                block_results[b] = std::move(bc);
            } catch (...) {
                block_errors[b] = std::current_exception();
            }
        }
    };

    const unsigned threads = effective_threads(opt.threads, B);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (std::size_t b = 0; b < B; ++b)
        if (block_errors[b]) std::rethrow_exception(block_errors[b]);

    MonteCarloResult result;
    result.engine = kind;
    result.curve = MistakeCurve(CurveMode::monte_carlo, n, T);
    for (std::size_t b = 0; b < B; ++b) {
        result.curve.merge_block(b, block_results[b]);
        result.invariants.cells += block_cells[b];
        for (auto& v : block_violations[b])
            result.invariants.violations.push_back(std::move(v));
    }
    result.invariants.trajectories = opt.trials;
    return result;
}

// ---------------------------------------------------------------------------
// Exact forward
// ---------------------------------------------------------------------------

struct ExactForwardOptions {
    TieRule tie{};
    std::uint64_t enum_budget = kDefaultEnumBudget;
    std::uint64_t node_budget = kDefaultNodeBudget;
};

inline MistakeCurve run_exact_forward(const SignalModel& model, const Network& net,
                                      std::size_t T, EngineChoice choice,
                                      const ExactForwardOptions& opt = {}) {
    EngineKind kind = resolve_engine(choice, model, net);
    if (kind == EngineKind::star) {
        if (choice == EngineChoice::star)
            throw ConfigError("exact forward mode is provided by the generic and factorized "
                              "engines; use engine=auto or engine=generic for star networks");
        kind = EngineKind::generic;
    }
    // a lone agent's curve is a binomial tail sum; closed form reaches any
    // horizon while the history expansion is capped at T = 62
    if (kind == EngineKind::factorized && net.size() == 1)
        return single_agent_exact_mistakes(model, T, opt.tie);
    if (kind == EngineKind::factorized)
        return FactorizedCompleteEngine(model, net, T, opt.tie).exact_forward(opt.node_budget);
    return GenericEngine(model, net, T, opt.enum_budget, opt.tie).exact_forward();
}

// ---------------------------------------------------------------------------
// Imitation check: an observer is (up to one period of lag and, for patient
// agents, a 1/(1-delta) factor) at least as accurate as anyone it observes.
// ---------------------------------------------------------------------------

struct ImitationViolation {
    std::size_t observer = 0;
    std::size_t observed = 0;
    std::size_t t = 0; // 1-based period of the observer's action
    double lhs = 0.0;  // P[a_t^observer != theta]
    double rhs = 0.0;  // P[a_{t-1}^observed != theta] / (1 - delta) + slack
};

struct ImitationReport {
    std::uint64_t comparisons = 0;
    std::vector<ImitationViolation> violations;

    bool ok() const { return violations.empty(); }
};

inline ImitationReport check_imitation(const MistakeCurve& curve, const Network& net,
                                       double delta = 0.0) {
    if (delta < 0.0 || delta >= 1.0) throw ConfigError("check_imitation: need 0 <= delta < 1");
    ImitationReport report;
    const double factor = 1.0 / (1.0 - delta);
    for (std::size_t i = 0; i < net.size(); ++i) {
        for (auto j : net.neighbors(i)) {
            for (std::size_t t = 2; t <= curve.horizon(); ++t) {
                const double lhs = curve.p_hat(Conditioning::unconditional, i, t - 1);
                const double prev = curve.p_hat(Conditioning::unconditional, j, t - 2);
                double slack = 1e-12;
                if (!curve.exact()) {
                    const double se_i = curve.se(Conditioning::unconditional, i, t - 1);
                    const double se_j = curve.se(Conditioning::unconditional, j, t - 2);
                    slack = 4.0 * std::sqrt(se_i * se_i + se_j * se_j);
                }
                ++report.comparisons;
                if (lhs > factor * prev + slack)
                    report.violations.push_back(
                        {i, static_cast<std::size_t>(j), t, lhs, factor * prev + slack});
            }
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Sample paths of the social likelihood (per state), for trend inspection.
// ---------------------------------------------------------------------------

struct SocialPath {
    State theta = State::g;
    std::uint64_t trial = 0;
    std::size_t n = 0;
    std::size_t horizon = 0;
    std::vector<double> ratio; // [agent * horizon + t] = S_t / t
};

// Re-walks the Monte Carlo trial sequence of `seed` and keeps the first
// `per_state` trajectories of each state.
inline std::vector<SocialPath> collect_social_paths(const SignalModel& model, const Network& net,
                                                    std::size_t T, EngineChoice choice,
                                                    std::uint64_t seed, std::size_t per_state,
                                                    TieRule tie = {},
                                                    std::uint64_t enum_budget = kDefaultEnumBudget) {
    const std::size_t n = net.size();
    const EngineHandle engine(model, net, T, resolve_engine(choice, model, net), tie, enum_budget);
    EngineHandle::Scratch scratch = engine.make_scratch();
    TrajectoryRecord rec;
    SignalMatrix signals;
    std::vector<SocialPath> out;
    std::size_t got_g = 0, got_b = 0;
    for (std::uint64_t trial = 0; got_g < per_state || got_b < per_state; ++trial) {
        const std::uint64_t ts = trial_seed(seed, trial);
        const State theta = state_stream(ts).bernoulli(0.5) ? State::g : State::b;
        auto& got = theta == State::g ? got_g : got_b;
        if (got >= per_state) continue;
        ++got;
        sample_signals_into(model, theta, n, T, ts, signals);
        engine.run_into(signals, theta, rec, scratch);
        SocialPath path;
        path.theta = theta;
        path.trial = trial;
        path.n = n;
        path.horizon = T;
        path.ratio.resize(n * T);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t t = 1; t <= T; ++t)
                path.ratio[i * T + (t - 1)] =
                    rec.belief(i, t - 1).S / static_cast<double>(t);
        out.push_back(std::move(path));
    }
    return out;
}

} // namespace netlearn
