// Full verification suite: the oracle, invariant and benchmark checks the
// project is accepted against, each with a wall-clock budget. Shared by the
// `verify` CLI subcommand and the acceptance test binary.
#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "netlearn/config.hpp"
#include "netlearn/dynamics.hpp"
#include "netlearn/engine_factorized.hpp"
#include "netlearn/engine_generic.hpp"
#include "netlearn/engine_star.hpp"
#include "netlearn/experiment.hpp"
#include "netlearn/rates.hpp"
#include "netlearn/strategic.hpp"
#include "netlearn/theory.hpp"

namespace netlearn {

struct CheckResult {
    std::string name;
    bool passed = false;
    bool skipped = false;
    double seconds = 0.0;
    double limit_seconds = 0.0;
    std::string detail;
};

struct VerifyOptions {
    unsigned threads = 0;
    bool quick = false; // skip the long Monte Carlo checks
    std::string scratch_dir = "out/verify";
};

namespace verify_detail {

inline void fail(std::ostringstream& msg, bool& ok, const std::string& what) {
    ok = false;
    if (!msg.str().empty()) msg << "; ";
    msg << what;
}

inline std::string fmt3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.5g", v);
    return buf;
}

// all binary signal matrices of shape n x T, invoking fn on each
template <typename Fn>
inline void for_each_matrix(std::size_t n, std::size_t T, const Fn& fn) {
    SignalMatrix mat(n, T);
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << (n * T)); ++code) {
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t t = 0; t < T; ++t) mat.at(j, t) = (code >> (j * T + t)) & 1;
        fn(mat);
    }
}

inline bool beliefs_close(const BeliefState& a, const BeliefState& b) {
    return std::abs(a.L - b.L) <= kLlrTol && std::abs(a.S - b.S) <= kLlrTol &&
           std::abs(a.P - b.P) <= kLlrTol && std::abs(a.p - b.p) <= kLlrTol;
}

// the deepest window usable by every agent simultaneously (intersection of
// the per-agent auto windows), so cross-agent slope comparisons share cells
inline RateWindow common_window(const MistakeCurve& curve, const RateOptions& opt) {
    RateWindow w{1, curve.horizon()};
    for (std::size_t i = 0; i < curve.agents(); ++i) {
        const RateWindow wi = auto_window(curve, i, opt);
        w.t_min = std::max(w.t_min, wi.t_min);
        w.t_max = std::min(w.t_max, wi.t_max);
    }
    if (w.t_min >= w.t_max) throw ConfigError("no common estimation window across agents");
    return w;
}

// pool several agents' counts into a single-agent Monte Carlo curve
inline MistakeCurve pool_agents(const MistakeCurve& curve, const std::vector<std::size_t>& agents) {
    const std::size_t T = curve.horizon();
    MistakeCurve pooled(CurveMode::monte_carlo, 1, T);
    for (std::size_t b = 0; b < curve.blocks().size(); ++b) {
        const BlockCounts& src = curve.blocks()[b];
        BlockCounts bc;
        bc.trials_g = src.trials_g * agents.size();
        bc.trials_b = src.trials_b * agents.size();
        bc.mistakes_g.assign(T, 0);
        bc.mistakes_b.assign(T, 0);
        for (std::size_t a : agents)
            for (std::size_t t = 0; t < T; ++t) {
                bc.mistakes_g[t] += src.mistakes_g[a * T + t];
                bc.mistakes_b[t] += src.mistakes_b[a * T + t];
            }
        pooled.merge_block(b, bc);
    }
    return pooled;
}

} // namespace verify_detail

using CheckFn = std::function<void(std::ostringstream&, bool&)>;

inline CheckResult timed_check(const std::string& name, double limit_seconds,
                               const CheckFn& body) {
    CheckResult result;
    result.name = name;
    result.limit_seconds = limit_seconds;
    std::ostringstream detail;
    bool ok = true;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(detail, ok);
    } catch (const std::exception& e) {
        ok = false;
        detail << " unexpected error: " << e.what();
    }
    result.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (result.seconds > limit_seconds) {
        ok = false;
        detail << " (exceeded " << limit_seconds << "s budget)";
    }
    result.passed = ok;
    result.detail = detail.str();
    return result;
}

// ---------------------------------------------------------------------------
// the checks
// ---------------------------------------------------------------------------

// r_a, M and the crossover agent count for the 0.9-accurate binary signal
inline CheckResult check_constants_anchor() {
    return timed_check("constants-anchor", 1.0, [](std::ostringstream& d, bool& ok) {
        const RateBounds rb = compute_bounds(make_symmetric_binary(0.9));
        if (std::abs(rb.M - 4.39445) > 1e-4)
            verify_detail::fail(d, ok, "M = " + fmt_double(rb.M));
        if (std::abs(rb.r_a - 0.51083) > 1e-4)
            verify_detail::fail(d, ok, "r_a = " + fmt_double(rb.r_a));
        if (rb.crossover_n != 9)
            verify_detail::fail(d, ok, "crossover_n = " + std::to_string(rb.crossover_n));
        if (ok)
            d << "M = " << verify_detail::fmt3(rb.M) << ", r_a = " << verify_detail::fmt3(rb.r_a)
              << ", crossover n = " << rb.crossover_n;
    });
}

// slope of the exact autarky mistake curve over t in [50, 200]
inline CheckResult check_single_agent_rate() {
    return timed_check("single-agent-rate", 5.0, [](std::ostringstream& d, bool& ok) {
        SignalModel m = make_symmetric_binary(0.9);
        const double ra = autarky_rate(m);
        MistakeCurve curve = single_agent_exact_mistakes(m, 200);
        RateEstimate est = estimate_rate(curve, 0, RateWindow{50, 200}, RateMethod::ols_log);
        const double rel = std::abs(est.rate - ra) / ra;
        d << "slope " << verify_detail::fmt3(est.rate) << " vs r_a " << verify_detail::fmt3(ra)
          << " (" << verify_detail::fmt3(rel * 100) << "% off)";
        if (rel >= 0.02) verify_detail::fail(d, ok, "relative error exceeds 2%");
    });
}

// complete and star engines against the generic enumeration engine, every
// binary signal matrix for n in {2,3}, horizons 1..5, p in {0.6, 0.75, 0.9}
inline CheckResult check_engine_equivalence() {
    return timed_check("engine-equivalence", 120.0, [](std::ostringstream& d, bool& ok) {
        std::uint64_t cells = 0;
        for (double p : {0.6, 0.75, 0.9}) {
            SignalModel m = make_symmetric_binary(p);
            for (std::size_t n : {std::size_t{2}, std::size_t{3}}) {
                for (std::size_t T : {std::size_t{1}, std::size_t{2}, std::size_t{3},
                                      std::size_t{4}, std::size_t{5}}) {
                    Network complete = make_topology(Topology::complete, n);
                    Network star = make_topology(Topology::star, n);
                    GenericEngine gen_c(m, complete, T);
                    GenericEngine gen_s(m, star, T);
                    FactorizedCompleteEngine fac(m, complete, T);
                    StarEngine se(m, star, T);
                    verify_detail::for_each_matrix(n, T, [&](const SignalMatrix& mat) {
                        TrajectoryRecord a = gen_c.run(mat, State::g);
                        TrajectoryRecord b = fac.run(mat, State::g);
                        TrajectoryRecord c = gen_s.run(mat, State::g);
                        TrajectoryRecord e = se.run(mat, State::g);
                        for (std::size_t i = 0; i < n; ++i)
                            for (std::size_t t = 0; t < T; ++t) {
                                ++cells;
                                if (a.action(i, t) != b.action(i, t) ||
                                    !verify_detail::beliefs_close(a.belief(i, t), b.belief(i, t)))
                                    verify_detail::fail(d, ok, "complete mismatch at n=" +
                                                                   std::to_string(n));
                                if (c.action(i, t) != e.action(i, t) ||
                                    !verify_detail::beliefs_close(c.belief(i, t), e.belief(i, t)))
                                    verify_detail::fail(d, ok,
                                                        "star mismatch at n=" + std::to_string(n));
                            }
                    });
                }
            }
        }
        if (ok) d << cells << " agent-period cells identical across engines";
    });
}

// decomposition and private-likelihood bound over >= 1e5 Monte Carlo
// trajectories spanning the three engine families
inline CheckResult check_likelihood_invariants(unsigned threads, bool quick) {
    return timed_check("likelihood-invariants", 300.0, [=](std::ostringstream& d, bool& ok) {
        const std::uint64_t scale = quick ? 10 : 1;
        std::uint64_t trajectories = 0, cells = 0;
        struct Job {
            Topology topo;
            std::size_t n, T;
            double p;
            std::uint64_t trials;
        };
        const std::vector<Job> jobs{{Topology::complete, 5, 40, 0.9, 40000},
                                    {Topology::complete, 4, 30, 0.75, 20000},
                                    {Topology::star, 11, 15, 0.9, 25000},
                                    {Topology::ring, 3, 6, 0.9, 25000}};
        for (const auto& s : jobs) {
            SignalModel m = make_symmetric_binary(s.p);
            Network net = make_topology(s.topo, s.n);
            MonteCarloOptions opt;
            opt.trials = s.trials / scale;
            opt.seed = 4242;
            opt.threads = threads;
            auto res = run_monte_carlo(m, net, s.T, EngineChoice::automatic, opt);
            if (!res.invariants.ok())
                verify_detail::fail(d, ok,
                                    std::string(to_string(s.topo)) + ": " +
                                        std::to_string(res.invariants.violations.size()) +
                                        " violations");
            trajectories += res.invariants.trajectories;
            cells += res.invariants.cells;
        }
        if (!quick && trajectories < 100000)
            verify_detail::fail(d, ok, "fewer than 1e5 trajectories");
        if (ok)
            d << trajectories << " trajectories, " << cells
              << " cells: decomposition and |P| <= M t hold everywhere";
    });
}

// zero imitation violations on exact curves at delta = 0
inline CheckResult check_imitation_exact() {
    return timed_check("imitation-exact", 120.0, [](std::ostringstream& d, bool& ok) {
        SignalModel m = make_symmetric_binary(0.9);
        std::uint64_t comparisons = 0;

        Network c2 = make_topology(Topology::complete, 2);
        MistakeCurve ex2 = run_exact_forward(m, c2, 12, EngineChoice::automatic);
        ImitationReport r2 = check_imitation(ex2, c2, 0.0);
        comparisons += r2.comparisons;
        if (!r2.ok())
            verify_detail::fail(d, ok,
                                "complete n=2: " + std::to_string(r2.violations.size()) +
                                    " violations");

        Network s3 = make_topology(Topology::star, 3);
        MistakeCurve ex3 = run_exact_forward(m, s3, 6, EngineChoice::automatic);
        ImitationReport r3 = check_imitation(ex3, s3, 0.0);
        comparisons += r3.comparisons;
        if (!r3.ok())
            verify_detail::fail(d, ok,
                                "star n=3: " + std::to_string(r3.violations.size()) +
                                    " violations");
        if (ok) d << comparisons << " lagged edge comparisons, zero violations";
    });
}

// rate bound and equal rates on complete networks, Monte Carlo at scale
inline CheckResult check_rate_bound_complete(unsigned threads, bool quick) {
    return timed_check("rate-bound-complete", 900.0, [=](std::ostringstream& d, bool& ok) {
        const std::uint64_t trials = quick ? 200000 : 10000000;
        std::ostringstream rates_seen;
        for (const auto& [n, p, T] :
             {std::tuple<std::size_t, double, std::size_t>{2, 0.9, 20},
              std::tuple<std::size_t, double, std::size_t>{3, 0.9, 20},
              std::tuple<std::size_t, double, std::size_t>{4, 0.9, 20},
              std::tuple<std::size_t, double, std::size_t>{5, 0.9, 20},
              std::tuple<std::size_t, double, std::size_t>{5, 0.75, 40}}) {
            SignalModel m = make_symmetric_binary(p);
            Network net = make_topology(Topology::complete, n);
            const RateBounds rb = compute_bounds(m);
            MonteCarloOptions opt;
            opt.trials = trials;
            opt.seed = 90210 + n;
            opt.threads = threads;
            auto mc = run_monte_carlo(m, net, T, EngineChoice::automatic, opt);
            if (!mc.invariants.ok()) verify_detail::fail(d, ok, "invariant violation in MC");
            // rate comparisons share one window so the slopes see identical
            // cells (auto windows can differ by a boundary cell of noise,
            // which would inject deterministic curvature into the spread)
            RateOptions ropt;
            const RateWindow cw = verify_detail::common_window(mc.curve, ropt);
            std::vector<RateEstimate> ests;
            for (std::size_t i = 0; i < n; ++i)
                ests.push_back(estimate_rate(mc.curve, i, cw, RateMethod::ols_log, ropt));
            BoundsVerdict v = compare_to_bounds(ests, rb, net, &mc.curve);
            for (const auto& av : v.agents)
                if (!av.within_M)
                    verify_detail::fail(d, ok,
                                        "n=" + std::to_string(n) + " p=" + verify_detail::fmt3(p) +
                                            ": rate " + verify_detail::fmt3(av.rate) +
                                            " exceeds M + 2se");
            // all pairs within 2 joint standard errors, with the joint se
            // combining the two block-bootstrap errors as if independent.
            // Herding makes the two estimates positively correlated, so this
            // overstates the spread's error; a genuine rate gap still shows
            // up at z ~ sqrt(trials) and fails loudly.
            for (std::size_t i = 0; i + 1 < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) {
                    const double diff = std::abs(ests[i].rate - ests[j].rate);
                    const double joint_se =
                        std::sqrt(ests[i].se * ests[i].se + ests[j].se * ests[j].se);
                    if (diff > 2.0 * joint_se + 1e-12)
                        verify_detail::fail(
                            d, ok,
                            "n=" + std::to_string(n) + " p=" + verify_detail::fmt3(p) +
                                ": agents " + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                " rates differ by " + verify_detail::fmt3(diff) + " > 2*" +
                                verify_detail::fmt3(joint_se));
                }
            rates_seen << " n=" << n << "@p=" << p << ": r=" << verify_detail::fmt3(ests[0].rate)
                       << " (M=" << verify_detail::fmt3(rb.M)
                       << ", n*r_a=" << verify_detail::fmt3(rb.public_benchmark(n)) << ")";
        }
        if (ok) d << "all rates within M + 2se, all agent pairs equal within 2 joint se;"
                  << rates_seen.str();
    });
}

// star n=11: peripheral rate near r_a, center dominating, sink components
inline CheckResult check_star_structure(unsigned threads, bool quick) {
    return timed_check("star-structure", 300.0, [=](std::ostringstream& d, bool& ok) {
        SignalModel m = make_symmetric_binary(0.9);
        Network net = make_topology(Topology::star, 11);
        const RateBounds rb = compute_bounds(m);

        // sink components: the ten peripheral singletons
        auto sinks = sink_components(net);
        if (sinks.size() != 10) {
            verify_detail::fail(d, ok, "expected 10 sink components, got " +
                                           std::to_string(sinks.size()));
        } else {
            for (std::size_t k = 0; k < sinks.size(); ++k)
                if (sinks[k].size() != 1 || sinks[k][0] != k + 1)
                    verify_detail::fail(d, ok, "sink components are not the peripheral "
                                               "singletons");
        }

        MonteCarloOptions opt;
        opt.trials = quick ? 300000 : 3000000;
        opt.seed = 2026;
        opt.threads = threads;
        const std::size_t T = 20;
        auto mc = run_monte_carlo(m, net, T, EngineChoice::automatic, opt);
        if (!mc.invariants.ok()) verify_detail::fail(d, ok, "invariant violation in MC");

        // pooled peripheral curve: the ten spokes are exchangeable
        std::vector<std::size_t> peripherals;
        for (std::size_t i = 1; i <= 10; ++i) peripherals.push_back(i);
        MistakeCurve pooled = verify_detail::pool_agents(mc.curve, peripherals);
        RateOptions ropt;
        RateWindow w = auto_window(pooled, 0, ropt);
        w.t_min = std::max<std::size_t>(w.t_min, 5);
        RateEstimate peripheral = estimate_rate(pooled, 0, w, RateMethod::ols_log, ropt);
        const double rel = std::abs(peripheral.rate - rb.r_a) / rb.r_a;
        d << "peripheral rate " << verify_detail::fmt3(peripheral.rate) << " vs r_a "
          << verify_detail::fmt3(rb.r_a) << " (" << verify_detail::fmt3(rel * 100) << "% off)";
        if (rel >= 0.10)
            verify_detail::fail(d, ok, "pooled peripheral rate more than 10% from r_a");

        // center's mistakes never exceed a peripheral's where counts allow
        for (std::size_t t = 0; t < T; ++t) {
            for (std::size_t i = 1; i <= 10; ++i) {
                if (mc.curve.mistakes(Conditioning::unconditional, 0, t) < 50 ||
                    mc.curve.mistakes(Conditioning::unconditional, i, t) < 50)
                    continue;
                const double pc = mc.curve.p_hat(Conditioning::unconditional, 0, t);
                const double pp = mc.curve.p_hat(Conditioning::unconditional, i, t);
                const double se = std::sqrt(
                    std::pow(mc.curve.se(Conditioning::unconditional, 0, t), 2) +
                    std::pow(mc.curve.se(Conditioning::unconditional, i, t), 2));
                if (pc > pp + 4.0 * se)
                    verify_detail::fail(d, ok, "center worse than peripheral at t=" +
                                                   std::to_string(t + 1));
            }
        }

        // minimum rate within M (some agent must be slow). The start clamp
        // applies to the slow peripherals only; the center's mistakes can
        // die out before t=5 entirely, and the minimum cannot sit there.
        std::vector<RateEstimate> ests;
        std::size_t missing = 0;
        for (std::size_t i = 0; i < 11; ++i) {
            try {
                RateWindow wi = auto_window(mc.curve, i, ropt);
                if (i != 0) wi.t_min = std::max<std::size_t>(wi.t_min, 5);
                ests.push_back(estimate_rate(mc.curve, i, wi, RateMethod::ols_log, ropt));
            } catch (const ConfigError&) {
                ++missing;
                if (i != 0)
                    verify_detail::fail(d, ok, "missing estimation window for peripheral " +
                                                   std::to_string(i + 1));
            }
        }
        if (!ests.empty()) {
            std::size_t arg_min = 0;
            for (std::size_t k = 1; k < ests.size(); ++k)
                if (ests[k].rate < ests[arg_min].rate) arg_min = k;
            if (ests[arg_min].rate > rb.M + 2.0 * ests[arg_min].se)
                verify_detail::fail(d, ok, "min rate exceeds M + 2se");
            if (ests[arg_min].agent == 0)
                verify_detail::fail(d, ok, "slowest agent is the center, expected a peripheral");
            d << "; min rate " << verify_detail::fmt3(ests[arg_min].rate) << " (agent "
              << ests[arg_min].agent + 1 << ") vs M " << verify_detail::fmt3(rb.M)
              << (missing ? "; center window below floor horizon" : "");
        }
    });
}

// strategic micro games: equilibrium certification, threshold rule, utility
// consistency with exact forward accuracies
inline CheckResult check_strategic_micro() {
    return timed_check("strategic-micro", 180.0, [](std::ostringstream& d, bool& ok) {
        std::uint64_t certified = 0, threshold_sets = 0;
        for (double p : {0.75, 0.9}) {
            for (std::size_t n : {std::size_t{2}, std::size_t{3}}) {
                for (double delta : {0.0, 0.3, 0.6}) {
                    MicroGame game(make_symmetric_binary(p),
                                   make_topology(Topology::complete, n), 2, delta);
                    StrategyProfile myopic = myopic_profile(game);

                    // certification: no profitable deviation
                    bool is_candidate = true;
                    for (std::size_t i = 0; i < n; ++i) {
                        DeviationResult dev = best_deviation(game, myopic, i);
                        if (delta == 0.0 && dev.gain > kGainTol)
                            verify_detail::fail(
                                d, ok,
                                "myopic profile improvable at delta=0 (gain " +
                                    verify_detail::fmt3(dev.gain) + ")");
                        if (dev.gain > kGainTol) is_candidate = false;
                    }
                    if (!is_candidate) continue;
                    ++certified;

                    // threshold rule on the certified candidate
                    ThresholdReport rep = check_myopic_threshold(game, myopic);
                    threshold_sets += rep.covered;
                    if (!rep.ok())
                        verify_detail::fail(
                            d, ok,
                            "threshold violations at p=" + verify_detail::fmt3(p) +
                                " delta=" + verify_detail::fmt3(delta));

                    // utilities against exact-forward accuracies
                    if (delta == 0.0) {
                        auto u = expected_utility(game, myopic);
                        MistakeCurve ex =
                            run_exact_forward(game.model, game.net, 2, EngineChoice::automatic);
                        for (std::size_t i = 0; i < n; ++i)
                            for (std::size_t t = 0; t < 2; ++t) {
                                const double acc =
                                    1.0 - ex.p_hat(Conditioning::unconditional, i, t);
                                if (std::abs(u[i].per_period[t] - acc) > 1e-12)
                                    verify_detail::fail(d, ok, "utility mismatch vs exact "
                                                               "forward");
                            }
                    }
                }
            }
        }
        if (ok)
            d << certified << " certified equilibrium candidates, " << threshold_sets
              << " covered information sets, zero threshold violations";
    });
}

// the bundled presets run end to end and reproduce their headline numbers
inline CheckResult check_presets(unsigned threads, bool quick, const std::string& scratch_dir) {
    return timed_check("presets", 300.0, [=](std::ostringstream& d, bool& ok) {
        namespace fs = std::filesystem;
        for (const std::string& name : preset_names()) {
            ExperimentConfig config = preset_config(name);
            config.threads = threads;
            if (quick && config.mode == "monte_carlo")
                config.trials = std::min<std::uint64_t>(config.trials, 100000);
            config.out_dir = (fs::path(scratch_dir) / name).string();
            ExperimentResult result = run_experiment(config);
            if (!result.invariants.ok())
                verify_detail::fail(d, ok, name + ": invariant violations");
            if (!fs::exists(result.out_dir / "curve.csv") ||
                !fs::exists(result.out_dir / "verdict.json"))
                verify_detail::fail(d, ok, name + ": missing output files");
            if (name == "headline-0.9") {
                if (std::abs(result.bounds.M - 4.39445) > 1e-4 ||
                    std::abs(result.bounds.r_a - 0.51083) > 1e-4 ||
                    result.bounds.crossover_n != 9)
                    verify_detail::fail(d, ok, "headline-0.9: benchmark numbers off");
                if (result.estimates.empty() ||
                    std::abs(result.estimates[0].rate - result.bounds.r_a) /
                            result.bounds.r_a >=
                        0.02)
                    verify_detail::fail(d, ok, "headline-0.9: exact-curve slope off r_a");
            }
            if (name == "star-11" && result.verdict) {
                if (!result.verdict->min_rate_ok)
                    verify_detail::fail(d, ok, "star-11: min rate exceeds M");
                if (result.verdict->argmin_agent == 0)
                    verify_detail::fail(d, ok, "star-11: center is not expected to be slowest");
            }
        }
        if (ok) d << preset_names().size() << " presets ran with clean invariants";
    });
}

// identical experiment outputs, byte for byte, at 1 and 8 workers
inline CheckResult check_determinism(const std::string& scratch_dir) {
    return timed_check("determinism", 60.0, [=](std::ostringstream& d, bool& ok) {
        namespace fs = std::filesystem;
        ExperimentConfig config;
        config.signal.p = 0.9;
        config.network.kind = "star";
        config.network.n = 5;
        config.horizon = 10;
        config.trials = 50000;
        config.seed = 777;

        auto slurp = [](const fs::path& p) {
            std::ifstream in(p, std::ios::binary);
            std::ostringstream ss;
            ss << in.rdbuf();
            return ss.str();
        };

        config.threads = 1;
        config.out_dir = (fs::path(scratch_dir) / "det1").string();
        run_experiment(config);
        config.threads = 8;
        config.out_dir = (fs::path(scratch_dir) / "det8").string();
        run_experiment(config);

        std::size_t files = 0;
        for (const char* name : {"curve.csv", "blocks.csv", "rates.csv", "verdict.txt",
                                 "verdict.json", "series_neglogp.csv", "series_social.csv",
                                 "summary.jsonl"}) {
            ++files;
            const std::string a = slurp(fs::path(scratch_dir) / "det1" / name);
            const std::string b = slurp(fs::path(scratch_dir) / "det8" / name);
            if (a.empty() || a != b)
                verify_detail::fail(d, ok, std::string(name) + " differs between 1 and 8 workers");
        }
        if (ok) d << files << " result files byte-identical at 1 and 8 workers";
    });
}

inline std::vector<CheckResult> run_verification(const VerifyOptions& opt = {}) {
    std::vector<CheckResult> results;
    results.push_back(check_constants_anchor());
    results.push_back(check_single_agent_rate());
    results.push_back(check_engine_equivalence());
    results.push_back(check_likelihood_invariants(opt.threads, opt.quick));
    results.push_back(check_imitation_exact());
    results.push_back(check_rate_bound_complete(opt.threads, opt.quick));
    results.push_back(check_star_structure(opt.threads, opt.quick));
    results.push_back(check_strategic_micro());
    results.push_back(check_determinism(opt.scratch_dir));
    results.push_back(check_presets(opt.threads, opt.quick, opt.scratch_dir));
    return results;
}

inline int print_verification(const std::vector<CheckResult>& results, std::FILE* out) {
    int failures = 0;
    for (const CheckResult& r : results) {
        const char* tag = r.skipped ? "SKIP" : (r.passed ? "PASS" : "FAIL");
        if (!r.skipped && !r.passed) ++failures;
        std::fprintf(out, "[%s] %-22s %7.2fs (limit %.0fs)  %s\n", tag, r.name.c_str(), r.seconds,
                     r.limit_seconds, r.detail.c_str());
    }
    std::fprintf(out, "%s: %zu checks, %d failures\n", failures == 0 ? "SUCCESS" : "FAILURE",
                 results.size(), failures);
    return failures == 0 ? 0 : 1;
}

} // namespace netlearn
