// End-to-end experiment runs: wires a validated config to the dynamics and
// rates modules and persists machine-readable outputs.
//
// Every run writes into its output directory:
//   config.json         echo of the configuration (hash recomputable)
//   curve.csv           mistake curve (per conditioning, agent, period)
//   blocks.csv          per-block counts (Monte Carlo mode; bootstrap input)
//   rates.csv           per-agent rate estimates over the selected windows
//   verdict.txt/.json   bounds comparison, imitation check, invariant status
//   series_neglogp.csv  t vs -log p_hat per agent (plot-ready)
//   series_social.csv   t vs S_t/t sample paths per state (plot-ready)
//   summary.jsonl       one-line run record
//
// Outputs contain no timestamps and all floats are printed with %.17g, so a
// rerun with the same config and seed is byte-identical at any worker count.
#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "netlearn/config.hpp"
#include "netlearn/curve.hpp"
#include "netlearn/dynamics.hpp"
#include "netlearn/rates.hpp"
#include "netlearn/theory.hpp"

namespace netlearn {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

// --- curve table -------------------------------------------------------------

inline void write_curve_csv(const MistakeCurve& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "state_conditioning,agent,t,mistakes,trials,p_hat,log_p_hat,se";
    if (curve.exact()) out << ",p_exact";
    out << "\n";
    for (Conditioning c : {Conditioning::unconditional, Conditioning::given_g,
                           Conditioning::given_b}) {
        for (std::size_t i = 0; i < curve.agents(); ++i)
            for (std::size_t t = 1; t <= curve.horizon(); ++t) {
                const double p = curve.p_hat(c, i, t - 1);
                out << to_string(c) << ',' << (i + 1) << ',' << t << ','
                    << curve.mistakes_or_zero(c, i, t - 1) << ',' << curve.trials_or_zero(c)
                    << ',' << fmt_double(p) << ',' << fmt_double(std::log(p)) << ','
                    << fmt_double(curve.se(c, i, t - 1));
                if (curve.exact()) out << ',' << fmt_double(curve.p_exact(c, i, t - 1));
                out << "\n";
            }
    }
}

inline void write_blocks_csv(const MistakeCurve& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "block,state,trials,agent,t,mistakes\n";
    const auto& blocks = curve.blocks();
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        for (State s : {State::g, State::b}) {
            const auto& mist = s == State::g ? blocks[b].mistakes_g : blocks[b].mistakes_b;
            const std::uint64_t tr = s == State::g ? blocks[b].trials_g : blocks[b].trials_b;
            for (std::size_t i = 0; i < curve.agents(); ++i)
                for (std::size_t t = 1; t <= curve.horizon(); ++t)
                    out << b << ',' << to_string(s) << ',' << tr << ',' << (i + 1) << ',' << t
                        << ',' << mist[i * curve.horizon() + (t - 1)] << "\n";
        }
    }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

} // namespace detail

// Rebuilds a curve from curve.csv, attaching per-block counts from
// blocks.csv when that file exists next to it (which restores bootstrap
// standard errors exactly).
inline MistakeCurve read_curve_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(path + ": empty file");
    const bool exact = line.find(",p_exact") != std::string::npos;

    struct Row {
        std::string cond;
        std::size_t agent, t;
        std::uint64_t mistakes, trials;
        double p_exact;
    };
    std::vector<Row> rows;
    std::size_t n = 0, T = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = detail::split_csv_line(line);
        if (f.size() < 8) throw ConfigError(path + ": malformed row '" + line + "'");
        Row r;
        r.cond = f[0];
        r.agent = std::stoul(f[1]);
        r.t = std::stoul(f[2]);
        r.mistakes = std::stoull(f[3]);
        r.trials = std::stoull(f[4]);
        r.p_exact = exact ? std::strtod(f[8].c_str(), nullptr) : 0.0;
        n = std::max(n, r.agent);
        T = std::max(T, r.t);
        rows.push_back(r);
    }
    if (n == 0 || T == 0) throw ConfigError(path + ": no data rows");

    MistakeCurve curve(exact ? CurveMode::exact_forward : CurveMode::monte_carlo, n, T);
    if (exact) {
        std::vector<double> pg(n * T, 0.0), pb(n * T, 0.0);
        for (const Row& r : rows) {
            if (r.cond == "g") pg[(r.agent - 1) * T + (r.t - 1)] = r.p_exact;
            if (r.cond == "b") pb[(r.agent - 1) * T + (r.t - 1)] = r.p_exact;
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t t = 0; t < T; ++t) curve.set_exact(i, t, pg[i * T + t], pb[i * T + t]);
        return curve;
    }

    // Monte Carlo: prefer per-block counts when the sidecar file exists
    const std::filesystem::path blocks_path =
        std::filesystem::path(path).parent_path() / "blocks.csv";
    if (std::filesystem::exists(blocks_path)) {
        std::ifstream bin(blocks_path);
        std::string bline;
        std::getline(bin, bline); // header
        std::map<std::size_t, BlockCounts> blocks;
        while (std::getline(bin, bline)) {
            if (bline.empty()) continue;
            const auto f = detail::split_csv_line(bline);
            if (f.size() != 6) throw ConfigError("blocks.csv: malformed row");
            const std::size_t b = std::stoul(f[0]);
            auto& bc = blocks[b];
            if (bc.mistakes_g.empty()) {
                bc.mistakes_g.assign(n * T, 0);
                bc.mistakes_b.assign(n * T, 0);
            }
            const bool is_g = f[1] == "g";
            (is_g ? bc.trials_g : bc.trials_b) = std::stoull(f[2]);
            const std::size_t idx = (std::stoul(f[3]) - 1) * T + (std::stoul(f[4]) - 1);
            (is_g ? bc.mistakes_g : bc.mistakes_b)[idx] = std::stoull(f[5]);
        }
        for (auto& [b, bc] : blocks) curve.merge_block(b, bc);
        return curve;
    }

    // single-block fallback (rate estimation then uses delta-method errors)
    BlockCounts bc;
    bc.mistakes_g.assign(n * T, 0);
    bc.mistakes_b.assign(n * T, 0);
    for (const Row& r : rows) {
        const std::size_t idx = (r.agent - 1) * T + (r.t - 1);
        if (r.cond == "g") {
            bc.mistakes_g[idx] = r.mistakes;
            bc.trials_g = r.trials;
        } else if (r.cond == "b") {
            bc.mistakes_b[idx] = r.mistakes;
            bc.trials_b = r.trials;
        }
    }
    curve.merge_block(0, bc);
    return curve;
}

// --- rate table ----------------------------------------------------------

inline void write_rates_csv(const std::vector<RateEstimate>& estimates,
                            const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "agent,t_min,t_max,method,conditioning,rate,se,r_squared,residual_trend,cells\n";
    for (const RateEstimate& e : estimates)
        out << (e.agent + 1) << ',' << e.window.t_min << ',' << e.window.t_max << ','
            << to_string(e.method) << ',' << to_string(e.conditioning) << ','
            << fmt_double(e.rate) << ',' << fmt_double(e.se) << ',' << fmt_double(e.r_squared)
            << ',' << fmt_double(e.residual_trend) << ',' << e.cells << "\n";
}

// --- verdict ---------------------------------------------------------------

struct ExperimentResult {
    std::string hash;
    EngineKind engine = EngineKind::generic;
    RunMode mode = RunMode::monte_carlo;
    RateBounds bounds;
    MistakeCurve curve;
    InvariantReport invariants;
    std::vector<RateEstimate> estimates; // may be empty if no usable window
    std::optional<BoundsVerdict> verdict;
    ImitationReport imitation;
    std::vector<std::string> warnings;
    std::filesystem::path out_dir;
};

inline json verdict_to_json(const ExperimentResult& r) {
    json j;
    j["bounds"] = {{"M", r.bounds.M},
                   {"r_a", r.bounds.r_a},
                   {"crossover_n", r.bounds.crossover_n},
                   {"public_rate", r.bounds.public_benchmark(r.curve.agents())}};
    j["invariants"] = {{"trajectories", r.invariants.trajectories},
                       {"cells", r.invariants.cells},
                       {"violations", r.invariants.violations.size()}};
    j["imitation"] = {{"comparisons", r.imitation.comparisons},
                      {"violations", r.imitation.violations.size()}};
    if (r.verdict) {
        const BoundsVerdict& v = *r.verdict;
        json agents = json::array();
        for (const auto& av : v.agents)
            agents.push_back({{"agent", av.agent + 1},
                              {"rate", av.rate},
                              {"se", av.se},
                              {"within_M", av.within_M}});
        j["rates"] = {{"strongly_connected", v.strongly_connected},
                      {"agents", agents},
                      {"rate_bound_ok", v.rate_bound_ok},
                      {"min_rate_ok", v.min_rate_ok},
                      {"argmin_agent", v.argmin_agent + 1},
                      {"equal_rates_applicable", v.equal_rates_applicable},
                      {"spread", v.spread},
                      {"spread_joint_se", v.spread_joint_se},
                      {"equal_rates_ok", v.equal_rates_ok}};
    }
    return j;
}

inline std::string verdict_to_text(const ExperimentResult& r) {
    std::ostringstream out;
    out << "bounds: M = " << fmt_double(r.bounds.M) << " nats, r_a = " << fmt_double(r.bounds.r_a)
        << " nats/period, ";
    if (r.bounds.crossover_n > 0)
        out << "public benchmark passes M at n = " << r.bounds.crossover_n;
    else
        out << "uninformative signal (no crossover)";
    out << "\n";
    out << "invariants: " << r.invariants.trajectories << " trajectories, " << r.invariants.cells
        << " cells checked, " << r.invariants.violations.size() << " violations\n";
    out << "imitation: " << r.imitation.comparisons << " edge comparisons, "
        << r.imitation.violations.size() << " violations\n";
    if (r.verdict) {
        const BoundsVerdict& v = *r.verdict;
        out << "network: n = " << v.n
            << (v.strongly_connected ? ", strongly connected" : ", not strongly connected")
            << "; public-signal benchmark n*r_a = " << fmt_double(v.public_rate) << "\n";
        out << "agent  rate                  se                    within_M\n";
        for (const auto& av : v.agents)
            out << (av.agent + 1) << "      " << fmt_double(av.rate) << "  " << fmt_double(av.se)
                << "  " << (av.within_M ? "yes" : "NO") << "\n";
        if (v.strongly_connected) {
            out << "rate bound (all rates <= M + 2se): " << (v.rate_bound_ok ? "PASS" : "FAIL")
                << "\n";
            if (v.equal_rates_applicable)
                out << "equal rates (spread " << fmt_double(v.spread) << " <= 2 * "
                    << fmt_double(v.spread_joint_se)
                    << "): " << (v.equal_rates_ok ? "PASS" : "FAIL") << "\n";
        }
        out << "min-rate bound (min rate <= M + 2se, agent " << (v.argmin_agent + 1)
            << "): " << (v.min_rate_ok ? "PASS" : "FAIL") << "\n";
    } else {
        out << "rates: no estimate (no usable window for at least one agent)\n";
    }
    return out.str();
}

// --- run ---------------------------------------------------------------------

inline ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    ExperimentResult result;
    result.hash = config_hash(config);
    result.mode = config.run_mode();

    SignalModel model = config.signal.build();
    Network net = config.network.build(&result.warnings);
    result.bounds = compute_bounds(model);

    const std::filesystem::path dir(config.out_dir);
    std::filesystem::create_directories(dir);
    result.out_dir = dir;

    // config echo
    {
        std::ofstream out(dir / "config.json");
        out << json(config).dump(2) << "\n";
    }

    if (result.mode == RunMode::monte_carlo) {
        MonteCarloOptions opt;
        opt.trials = config.trials;
        opt.seed = config.seed;
        opt.threads = config.threads;
        opt.blocks = config.blocks;
        opt.collect_violations = config.collect_violations;
        MonteCarloResult mc =
            run_monte_carlo(model, net, config.horizon, config.engine_choice(), opt);
        result.curve = std::move(mc.curve);
        result.invariants = std::move(mc.invariants);
        result.engine = mc.engine;
        write_blocks_csv(result.curve, (dir / "blocks.csv").string());
    } else {
        ExactForwardOptions opt;
        result.curve = run_exact_forward(model, net, config.horizon, config.engine_choice(), opt);
        result.engine = resolve_engine(config.engine_choice(), model, net);
        if (result.engine == EngineKind::star) result.engine = EngineKind::generic;
    }
    write_curve_csv(result.curve, (dir / "curve.csv").string());

    // rate estimates
    RateOptions ropt;
    ropt.mistake_floor = config.rate_window.mistake_floor;
    bool all_agents = true;
    for (std::size_t i = 0; i < net.size(); ++i) {
        try {
            RateWindow w;
            if (config.rate_window.policy == "explicit") {
                w = RateWindow{config.rate_window.t_min, config.rate_window.t_max};
            } else {
                w = auto_window(result.curve, i, ropt);
                // best-effort start clamp: agents whose usable range ends
                // before the clamp keep their raw window
                if (config.rate_window.t_min > 0 &&
                    std::max(w.t_min, config.rate_window.t_min) < w.t_max)
                    w.t_min = std::max(w.t_min, config.rate_window.t_min);
            }
            result.estimates.push_back(
                estimate_rate(result.curve, i, w, config.method(), ropt));
        } catch (const ConfigError&) {
            all_agents = false;
        }
    }
    write_rates_csv(result.estimates, (dir / "rates.csv").string());
    if (all_agents && !result.estimates.empty())
        result.verdict = compare_to_bounds(result.estimates, result.bounds, net, &result.curve,
                                           config.method(), ropt);

    result.imitation = check_imitation(result.curve, net, 0.0);

    // plot-ready series
    {
        std::ofstream out(dir / "series_neglogp.csv");
        out << "agent,t,neg_log_p_hat\n";
        for (std::size_t i = 0; i < result.curve.agents(); ++i)
            for (std::size_t t = 1; t <= result.curve.horizon(); ++t)
                out << (i + 1) << ',' << t << ','
                    << fmt_double(-std::log(result.curve.p_hat(Conditioning::unconditional, i,
                                                               t - 1)))
                    << "\n";
    }
    {
        std::ofstream out(dir / "series_social.csv");
        out << "state,path,agent,t,s_over_t\n";
        auto paths = collect_social_paths(model, net, config.horizon, config.engine_choice(),
                                          config.seed, config.social_paths);
        for (std::size_t k = 0; k < paths.size(); ++k)
            for (std::size_t i = 0; i < paths[k].n; ++i)
                for (std::size_t t = 1; t <= paths[k].horizon; ++t)
                    out << to_string(paths[k].theta) << ',' << paths[k].trial << ',' << (i + 1)
                        << ',' << t << ',' << fmt_double(paths[k].ratio[i * paths[k].horizon + (t - 1)])
                        << "\n";
    }

    // verdict + summary
    {
        std::ofstream out(dir / "verdict.txt");
        out << verdict_to_text(result);
    }
    {
        std::ofstream out(dir / "verdict.json");
        out << verdict_to_json(result).dump(2) << "\n";
    }
    {
        std::ofstream out(dir / "summary.jsonl");
        json s{{"config_hash", result.hash},
               {"seed", config.seed},
               {"engine", to_string(result.engine)},
               {"mode", to_string(result.mode)},
               {"n", net.size()},
               {"horizon", config.horizon},
               {"trials", result.mode == RunMode::monte_carlo ? config.trials : 0},
               {"invariants",
                result.invariants.ok() ? "ok"
                                       : "violations:" +
                                             std::to_string(result.invariants.violations.size())},
               {"imitation_violations", result.imitation.violations.size()}};
        out << s.dump() << "\n";
    }
    return result;
}

} // namespace netlearn
