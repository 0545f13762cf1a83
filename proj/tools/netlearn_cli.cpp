// netlearn command line: bounds, run, rates, micro, verify.
//
// Exit codes: 0 success, 1 failed verification checks, 2 configuration
// error, 3 resource budget exceeded, 4 trajectory invariant violation.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "netlearn/config.hpp"
#include "netlearn/experiment.hpp"
#include "netlearn/strategic.hpp"
#include "netlearn/verify.hpp"

namespace {

using namespace netlearn;

std::string slurp_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cmd_bounds(double p, const std::string& config_path) {
    SignalModel model = config_path.empty()
                            ? make_symmetric_binary(p)
                            : parse_config_text(slurp_file(config_path)).signal.build();
    const RateBounds rb = compute_bounds(model);
    std::printf("quantity      value                 unit\n");
    std::printf("M             %-21.17g nats\n", rb.M);
    std::printf("r_a           %-21.17g nats/period\n", rb.r_a);
    if (rb.crossover_n > 0) {
        std::printf("crossover_n   %-21zu agents (smallest n with n*r_a > M)\n", rb.crossover_n);
    } else {
        std::printf("crossover_n   none                  (uninformative signal, r_a = 0)\n");
    }
    json record{{"M", rb.M}, {"r_a", rb.r_a}, {"crossover_n", rb.crossover_n}};
    std::printf("%s\n", record.dump().c_str());
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& preset,
            const std::uint64_t* seed, const std::uint64_t* trials, const unsigned* threads,
            const std::string& out_dir, bool collect_violations) {
    ExperimentConfig config;
    if (!preset.empty())
        config = preset_config(preset);
    else if (!config_path.empty())
        config = parse_config_text(slurp_file(config_path));
    else
        throw ConfigError("run: provide --config FILE or --preset NAME");
    if (seed) config.seed = *seed;
    if (trials) config.trials = *trials;
    if (threads) config.threads = *threads;
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (collect_violations) config.collect_violations = true;

    ExperimentResult result = run_experiment(config);
    for (const std::string& w : result.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    std::printf("%s", verdict_to_text(result).c_str());
    std::printf("outputs: %s (config hash %s, engine %s)\n", result.out_dir.string().c_str(),
                result.hash.c_str(), to_string(result.engine));
    if (!result.invariants.ok())
        throw InvariantViolationError(std::to_string(result.invariants.violations.size()) +
                                      " trajectory invariant violations (see verdict)");
    return 0;
}

int cmd_rates(const std::string& curve_path, const std::string& config_path,
              const std::string& method_name, std::size_t t_min, std::size_t t_max,
              std::uint64_t floor, const std::string& out_dir) {
    MistakeCurve curve = read_curve_csv(curve_path);
    const RateMethod method =
        method_name == "endpoint" ? RateMethod::endpoint : RateMethod::ols_log;
    RateOptions ropt;
    ropt.mistake_floor = floor;

    std::vector<RateEstimate> estimates;
    for (std::size_t i = 0; i < curve.agents(); ++i) {
        RateWindow w;
        if (t_min > 0 && t_max > 0)
            w = RateWindow{t_min, t_max};
        else
            w = auto_window(curve, i, ropt);
        estimates.push_back(estimate_rate(curve, i, w, method, ropt));
    }
    std::printf("agent  window      rate                   se                     R^2\n");
    for (const RateEstimate& e : estimates)
        std::printf("%-6zu [%zu, %zu]    %-22.17g %-22.17g %.6f\n", e.agent + 1, e.window.t_min,
                    e.window.t_max, e.rate, e.se, e.r_squared);

    if (!config_path.empty()) {
        ExperimentConfig config = parse_config_text(slurp_file(config_path));
        SignalModel model = config.signal.build();
        Network net = config.network.build();
        if (net.size() != curve.agents())
            throw ConfigError("rates: config network size does not match the curve");
        ExperimentResult shim;
        shim.bounds = compute_bounds(model);
        shim.curve = curve;
        shim.verdict =
            compare_to_bounds(estimates, shim.bounds, net, &curve, method, ropt);
        std::printf("%s", verdict_to_text(shim).c_str());
        if (!out_dir.empty()) {
            std::filesystem::create_directories(out_dir);
            write_rates_csv(estimates, (std::filesystem::path(out_dir) / "rates.csv").string());
            std::ofstream out(std::filesystem::path(out_dir) / "verdict.json");
            out << verdict_to_json(shim).dump(2) << "\n";
        }
    } else if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_rates_csv(estimates, (std::filesystem::path(out_dir) / "rates.csv").string());
    }
    return 0;
}

int cmd_micro(double p, std::size_t n, const std::string& topology, std::size_t T, double delta,
              const std::string& mode) {
    MicroGame game(make_symmetric_binary(p), make_topology(topology_from_string(topology), n), T,
                   delta);
    StrategyProfile myopic = myopic_profile(game);
    std::printf("micro game: %s n=%zu, T=%zu, p=%g, delta=%g\n", topology.c_str(), n, T, p,
                delta);

    if (mode == "one-shot") {
        OneShotReport rep = one_shot_deviation_check(game, myopic);
        std::printf("one-shot deviations (necessary condition only): %llu cases, max gain %.3g, "
                    "%zu profitable\n",
                    static_cast<unsigned long long>(rep.cases_checked), rep.max_gain,
                    rep.profitable.size());
        for (const OneShotCase& c : rep.profitable)
            std::printf("  profitable: agent %zu, t=%zu, gain %.6g\n", c.agent + 1, c.key.t,
                        c.gain);
    } else if (mode == "exhaustive") {
        bool certified = true;
        for (std::size_t i = 0; i < n; ++i) {
            DeviationResult dev = best_deviation(game, myopic, i);
            std::printf("agent %zu: best deviation gain %.3g over %llu strategies%s\n", i + 1,
                        dev.gain, static_cast<unsigned long long>(dev.strategies_searched),
                        dev.gain <= kGainTol ? "" : "  <-- improvable");
            certified = certified && dev.gain <= kGainTol;
        }
        std::printf("myopic profile: %s\n",
                    certified ? "certified equilibrium candidate" : "NOT an equilibrium");
        if (certified) {
            ThresholdReport rep = check_myopic_threshold(game, myopic);
            std::printf("threshold -log(1-delta) = %.6g: %llu sets covered, %llu below "
                        "threshold, %zu violations\n",
                        rep.threshold, static_cast<unsigned long long>(rep.covered),
                        static_cast<unsigned long long>(rep.below_threshold),
                        rep.violations.size());
        }
    } else {
        throw ConfigError("micro: mode must be 'exhaustive' or 'one-shot'");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"netlearn: exact Bayesian social learning on observation networks"};
    app.require_subcommand(1);
    app.fallthrough();

    unsigned threads = 0;
    auto* threads_opt =
        app.add_option("--threads", threads, "worker threads (0 = hardware)")
            ->envname("NETLEARN_THREADS");

    auto* bounds = app.add_subcommand("bounds", "signal benchmarks: M, r_a, crossover n");
    double bounds_p = 0.9;
    std::string bounds_config;
    bounds->add_option("--p", bounds_p, "symmetric binary signal accuracy");
    bounds->add_option("--config", bounds_config, "read the signal from an experiment config");

    auto* run = app.add_subcommand("run", "run an experiment from a config or preset");
    std::string run_config, run_preset, run_out;
    std::uint64_t run_seed = 0, run_trials = 0;
    auto* seed_opt = run->add_option("--seed", run_seed, "override the config seed");
    auto* trials_opt = run->add_option("--trials", run_trials, "override the trial count");
    run->add_option("--config", run_config, "experiment config (JSON)");
    run->add_option("--preset", run_preset, "preset name (headline-0.9, star-11, complete-3)");
    run->add_option("--out", run_out, "override the output directory");
    bool run_collect = false;
    run->add_flag("--collect-violations", run_collect,
                  "record invariant violations and continue (debugging; still exits 4)");

    auto* rates = app.add_subcommand("rates", "estimate learning rates from a curve file");
    std::string rates_curve, rates_config, rates_method = "ols_log", rates_out;
    std::size_t rates_tmin = 0, rates_tmax = 0;
    std::uint64_t rates_floor = 50;
    rates->add_option("--curve", rates_curve, "curve.csv from a run")->required();
    rates->add_option("--config", rates_config, "config for the bounds verdict");
    rates->add_option("--method", rates_method, "ols_log or endpoint");
    rates->add_option("--t-min", rates_tmin, "explicit window start");
    rates->add_option("--t-max", rates_tmax, "explicit window end");
    rates->add_option("--floor", rates_floor, "mistake floor per cell");
    rates->add_option("--out", rates_out, "write rates.csv (and verdict.json) here");

    auto* micro = app.add_subcommand("micro", "strategic checks on a micro game");
    double micro_p = 0.9, micro_delta = 0.0;
    std::size_t micro_n = 2, micro_T = 2;
    std::string micro_topo = "complete", micro_mode = "exhaustive";
    micro->add_option("--p", micro_p, "signal accuracy");
    micro->add_option("--n", micro_n, "agents (<= 3)");
    micro->add_option("--T", micro_T, "horizon (2 exhaustive, 3 one-shot)");
    micro->add_option("--delta", micro_delta, "discount factor in [0, 1)");
    micro->add_option("--topology", micro_topo, "complete or star");
    micro->add_option("--mode", micro_mode, "exhaustive or one-shot");

    auto* verify = app.add_subcommand("verify", "run the full verification suite");
    bool verify_quick = false;
    verify->add_flag("--quick", verify_quick, "reduced trial counts (smoke test)");

    try {
        app.parse(argc, argv);

        if (bounds->parsed()) return cmd_bounds(bounds_p, bounds_config);
        if (run->parsed())
            return cmd_run(run_config, run_preset, seed_opt->count() ? &run_seed : nullptr,
                           trials_opt->count() ? &run_trials : nullptr,
                           threads_opt->count() ? &threads : nullptr, run_out, run_collect);
        if (rates->parsed())
            return cmd_rates(rates_curve, rates_config, rates_method, rates_tmin, rates_tmax,
                             rates_floor, rates_out);
        if (micro->parsed())
            return cmd_micro(micro_p, micro_n, micro_topo, micro_T, micro_delta, micro_mode);
        if (verify->parsed()) {
            VerifyOptions opt;
            opt.threads = threads;
            opt.quick = verify_quick;
            return print_verification(run_verification(opt), stdout);
        }
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const netlearn::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const netlearn::ResourceError& e) {
        std::fprintf(stderr, "resource error: %s\n", e.what());
        return 3;
    } catch (const netlearn::InvariantViolationError& e) {
        std::fprintf(stderr, "invariant violation: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
    return 0;
}
