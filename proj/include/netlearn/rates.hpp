// Learning-rate estimation from mistake curves, and comparison against the
// theoretical bounds (the signal cap M, the autarky rate r_a and the
// public-signal benchmark n * r_a).
//
// The estimand liminf -(1/t) log P[a_t != theta] is proxied by the slope of
// -log p_hat over a finite window. Monte Carlo windows only admit cells with
// at least `mistake_floor` mistakes (default 50), which keeps the relative
// error of each log p_hat below ~15%; standard errors come from a bootstrap
// over the independent trial blocks recorded in the curve.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "netlearn/common.hpp"
#include "netlearn/curve.hpp"
#include "netlearn/network.hpp"
#include "netlearn/rng.hpp"
#include "netlearn/theory.hpp"

namespace netlearn {

enum class RateMethod { ols_log, endpoint };

inline const char* to_string(RateMethod m) {
    return m == RateMethod::ols_log ? "ols_log" : "endpoint";
}

struct RateWindow {
    std::size_t t_min = 1; // 1-based, inclusive
    std::size_t t_max = 1;
};

struct RateEstimate {
    std::size_t agent = 0;
    RateWindow window;
    RateMethod method = RateMethod::ols_log;
    Conditioning conditioning = Conditioning::unconditional;
    double rate = 0.0;           // nats per period
    double se = 0.0;             // 0 in exact mode
    double r_squared = 0.0;      // of the OLS fit over the window
    double residual_trend = 0.0; // mean OLS residual, upper third minus lower third
    std::size_t cells = 0;
};

struct RateOptions {
    std::uint64_t mistake_floor = 50;
    std::size_t bootstrap_resamples = 1000;
    std::uint64_t bootstrap_seed = 71;
    Conditioning conditioning = Conditioning::unconditional;
};

namespace detail {

inline bool cell_usable(const MistakeCurve& curve, std::size_t agent, std::size_t t,
                        Conditioning cond, std::uint64_t floor) {
    if (curve.exact()) return curve.p_hat(cond, agent, t - 1) > 0.0;
    return curve.mistakes(cond, agent, t - 1) >= floor;
}

struct Fit {
    double slope = 0.0;
    double r_squared = 0.0;
    double residual_trend = 0.0;
};

// least squares of y on t over the window, plus diagnostics
inline Fit ols_fit(const std::vector<double>& ts, const std::vector<double>& ys) {
    const std::size_t m = ts.size();
    double st = 0, sy = 0;
    for (std::size_t k = 0; k < m; ++k) {
        st += ts[k];
        sy += ys[k];
    }
    const double mt = st / m, my = sy / m;
    double stt = 0, sty = 0;
    for (std::size_t k = 0; k < m; ++k) {
        stt += (ts[k] - mt) * (ts[k] - mt);
        sty += (ts[k] - mt) * (ys[k] - my);
    }
    Fit fit;
    fit.slope = sty / stt;
    const double intercept = my - fit.slope * mt;
    double ss_res = 0, ss_tot = 0;
    std::vector<double> resid(m);
    for (std::size_t k = 0; k < m; ++k) {
        resid[k] = ys[k] - (intercept + fit.slope * ts[k]);
        ss_res += resid[k] * resid[k];
        ss_tot += (ys[k] - my) * (ys[k] - my);
    }
    fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    const std::size_t third = std::max<std::size_t>(1, m / 3);
    double lo = 0, hi = 0;
    for (std::size_t k = 0; k < third; ++k) {
        lo += resid[k];
        hi += resid[m - 1 - k];
    }
    fit.residual_trend = (hi - lo) / static_cast<double>(third);
    return fit;
}

inline double slope_from_ys(const std::vector<double>& ts, const std::vector<double>& ys,
                            RateMethod method) {
    if (method == RateMethod::endpoint)
        return (ys.back() - ys.front()) / (ts.back() - ts.front());
    return ols_fit(ts, ys).slope;
}

} // namespace detail

// Largest contiguous window of periods whose cells are usable (>= floor
// mistakes in Monte Carlo mode, positive probability in exact mode).
inline RateWindow auto_window(const MistakeCurve& curve, std::size_t agent,
                              const RateOptions& opt = {}) {
    std::size_t best_lo = 0, best_len = 0, lo = 0, len = 0;
    for (std::size_t t = 1; t <= curve.horizon(); ++t) {
        if (detail::cell_usable(curve, agent, t, opt.conditioning, opt.mistake_floor)) {
            if (len == 0) lo = t;
            ++len;
            if (len > best_len) {
                best_len = len;
                best_lo = lo;
            }
        } else {
            len = 0;
        }
    }
    if (best_len < 2)
        throw ConfigError("auto_window: no usable estimation window for agent " +
                          std::to_string(agent + 1));
    return {best_lo, best_lo + best_len - 1};
}

inline RateEstimate estimate_rate(const MistakeCurve& curve, std::size_t agent,
                                  RateWindow window, RateMethod method,
                                  const RateOptions& opt = {}) {
    if (window.t_min >= window.t_max || window.t_max > curve.horizon())
        throw ConfigError("estimate_rate: invalid window");
    std::vector<double> ts, ys;
    for (std::size_t t = window.t_min; t <= window.t_max; ++t) {
        if (!detail::cell_usable(curve, agent, t, opt.conditioning, opt.mistake_floor))
            throw ConfigError("estimate_rate: cell t=" + std::to_string(t) +
                              " does not meet the mistake floor / positivity requirement");
        ts.push_back(static_cast<double>(t));
        ys.push_back(-std::log(curve.p_hat(opt.conditioning, agent, t - 1)));
    }
    if (ts.empty()) throw ConfigError("estimate_rate: empty window after filtering");

    RateEstimate est;
    est.agent = agent;
    est.window = window;
    est.method = method;
    est.conditioning = opt.conditioning;
    est.cells = ts.size();
    const detail::Fit fit = detail::ols_fit(ts, ys);
    est.r_squared = fit.r_squared;
    est.residual_trend = fit.residual_trend;
    est.rate = method == RateMethod::ols_log ? fit.slope : detail::slope_from_ys(ts, ys, method);

    if (!curve.exact() && curve.blocks().size() < 2) {
        // curve loaded without per-block counts: independent-cell delta
        // method, var(-log p) ~ (1-p) / (p * trials)
        const std::uint64_t trials = curve.trials(opt.conditioning);
        double var = 0.0;
        if (method == RateMethod::endpoint) {
            for (std::size_t k : {std::size_t{0}, ts.size() - 1}) {
                const double p = curve.p_hat(opt.conditioning, agent,
                                             static_cast<std::size_t>(ts[k]) - 1);
                var += (1.0 - p) / (p * static_cast<double>(trials));
            }
            var /= (ts.back() - ts.front()) * (ts.back() - ts.front());
        } else {
            double mt = 0, stt = 0;
            for (double t : ts) mt += t;
            mt /= static_cast<double>(ts.size());
            for (double t : ts) stt += (t - mt) * (t - mt);
            for (std::size_t k = 0; k < ts.size(); ++k) {
                const double p = curve.p_hat(opt.conditioning, agent,
                                             static_cast<std::size_t>(ts[k]) - 1);
                const double w = (ts[k] - mt) / stt;
                var += w * w * (1.0 - p) / (p * static_cast<double>(trials));
            }
        }
        est.se = std::sqrt(var);
    } else if (!curve.exact()) {
        // bootstrap over trial blocks; the blocks are i.i.d. groups of
        // trials, so resampling them preserves the within-trajectory
        // dependence across periods
        const auto& blocks = curve.blocks();
        const std::size_t B = blocks.size();
        std::vector<double> boot_ys(ts.size());
        std::vector<double> slopes;
        slopes.reserve(opt.bootstrap_resamples);
        for (std::size_t r = 0; r < opt.bootstrap_resamples; ++r) {
            Xoshiro256pp rng(mix_seed(opt.bootstrap_seed, r));
            std::vector<std::uint32_t> picks(B);
            for (auto& p : picks) p = static_cast<std::uint32_t>(rng.next() % B);
            std::size_t k = 0;
            for (std::size_t t = window.t_min; t <= window.t_max; ++t, ++k) {
                double mist = 0, trials = 0;
                for (auto p : picks) {
                    const auto& bc = blocks[p];
                    switch (opt.conditioning) {
                        case Conditioning::given_g:
                            mist += static_cast<double>(bc.mistakes_g[agent * curve.horizon() + (t - 1)]);
                            trials += static_cast<double>(bc.trials_g);
                            break;
                        case Conditioning::given_b:
                            mist += static_cast<double>(bc.mistakes_b[agent * curve.horizon() + (t - 1)]);
                            trials += static_cast<double>(bc.trials_b);
                            break;
                        default:
                            mist += static_cast<double>(bc.mistakes_g[agent * curve.horizon() + (t - 1)] +
                                                        bc.mistakes_b[agent * curve.horizon() + (t - 1)]);
                            trials += static_cast<double>(bc.trials_g + bc.trials_b);
                    }
                }
                if (mist < 0.5) mist = 0.5; // log guard; vanishingly rare above the floor
                boot_ys[k] = -std::log(mist / trials);
            }
            slopes.push_back(detail::slope_from_ys(ts, boot_ys, method));
        }
        double mean = 0;
        for (double s : slopes) mean += s;
        mean /= static_cast<double>(slopes.size());
        double var = 0;
        for (double s : slopes) var += (s - mean) * (s - mean);
        est.se = std::sqrt(var / static_cast<double>(slopes.size() - 1));
    }
    return est;
}

inline RateEstimate estimate_rate(const MistakeCurve& curve, std::size_t agent,
                                  RateMethod method = RateMethod::ols_log,
                                  const RateOptions& opt = {}) {
    return estimate_rate(curve, agent, auto_window(curve, agent, opt), method, opt);
}

// Paired bootstrap of the rate difference between two agents (same block
// resample applied to both, so the common Monte Carlo noise cancels).
inline double bootstrap_difference_se(const MistakeCurve& curve, std::size_t agent_a,
                                      std::size_t agent_b, RateWindow wa, RateWindow wb,
                                      RateMethod method, const RateOptions& opt = {}) {
    if (curve.exact()) return 0.0;
    const auto& blocks = curve.blocks();
    const std::size_t B = blocks.size();
    auto window_ts = [](RateWindow w) {
        std::vector<double> ts;
        for (std::size_t t = w.t_min; t <= w.t_max; ++t) ts.push_back(static_cast<double>(t));
        return ts;
    };
    const std::vector<double> ts_a = window_ts(wa), ts_b = window_ts(wb);
    std::vector<double> ys_a(ts_a.size()), ys_b(ts_b.size());
    std::vector<double> diffs;
    diffs.reserve(opt.bootstrap_resamples);
    const std::size_t H = curve.horizon();
    for (std::size_t r = 0; r < opt.bootstrap_resamples; ++r) {
        Xoshiro256pp rng(mix_seed(opt.bootstrap_seed, r));
        std::vector<std::uint32_t> picks(B);
        for (auto& p : picks) p = static_cast<std::uint32_t>(rng.next() % B);
        auto fill = [&](std::size_t agent, RateWindow w, std::vector<double>& ys) {
            std::size_t k = 0;
            for (std::size_t t = w.t_min; t <= w.t_max; ++t, ++k) {
                double mist = 0, trials = 0;
                for (auto p : picks) {
                    const auto& bc = blocks[p];
                    mist += static_cast<double>(bc.mistakes_g[agent * H + (t - 1)] +
                                                bc.mistakes_b[agent * H + (t - 1)]);
                    trials += static_cast<double>(bc.trials_g + bc.trials_b);
                }
                if (mist < 0.5) mist = 0.5;
                ys[k] = -std::log(mist / trials);
            }
        };
        fill(agent_a, wa, ys_a);
        fill(agent_b, wb, ys_b);
        diffs.push_back(detail::slope_from_ys(ts_a, ys_a, method) -
                        detail::slope_from_ys(ts_b, ys_b, method));
    }
    double mean = 0;
    for (double d : diffs) mean += d;
    mean /= static_cast<double>(diffs.size());
    double var = 0;
    for (double d : diffs) var += (d - mean) * (d - mean);
    return std::sqrt(var / static_cast<double>(diffs.size() - 1));
}

// ---------------------------------------------------------------------------
// Verdict: estimated rates against M, the equal-rates property and the
// public-signal benchmark.
// ---------------------------------------------------------------------------

struct AgentVerdict {
    std::size_t agent = 0;
    double rate = 0.0;
    double se = 0.0;
    bool within_M = true;        // rate <= M + 2 se
    double public_benchmark = 0; // n * r_a
};

struct BoundsVerdict {
    bool strongly_connected = false;
    std::size_t n = 0;
    double M = 0.0;
    double r_a = 0.0;
    double public_rate = 0.0; // n * r_a
    std::vector<AgentVerdict> agents;

    bool rate_bound_ok = true;     // strongly connected: every rate within M
    bool min_rate_ok = true;       // any network: min rate within M
    std::size_t argmin_agent = 0;

    bool equal_rates_applicable = false; // Monte Carlo curves only
    double spread = 0.0;                 // max rate - min rate
    double spread_joint_se = 0.0;        // paired-bootstrap se of the spread
    bool equal_rates_ok = true;
};

inline BoundsVerdict compare_to_bounds(const std::vector<RateEstimate>& estimates,
                                       const RateBounds& bounds, const Network& net,
                                       const MistakeCurve* curve = nullptr,
                                       RateMethod method = RateMethod::ols_log,
                                       const RateOptions& opt = {}) {
    if (estimates.size() != net.size())
        throw ConfigError("compare_to_bounds: need one estimate per agent");
    BoundsVerdict v;
    v.strongly_connected = is_strongly_connected(net);
    v.n = net.size();
    v.M = bounds.M;
    v.r_a = bounds.r_a;
    v.public_rate = bounds.public_benchmark(net.size());

    std::size_t arg_min = 0, arg_max = 0;
    for (std::size_t k = 0; k < estimates.size(); ++k) {
        const RateEstimate& e = estimates[k];
        AgentVerdict av;
        av.agent = e.agent;
        av.rate = e.rate;
        av.se = e.se;
        av.within_M = e.rate <= bounds.M + 2.0 * e.se;
        av.public_benchmark = v.public_rate;
        v.agents.push_back(av);
        if (e.rate < estimates[arg_min].rate) arg_min = k;
        if (e.rate > estimates[arg_max].rate) arg_max = k;
    }
    v.argmin_agent = estimates[arg_min].agent;
    v.min_rate_ok = estimates[arg_min].rate <= bounds.M + 2.0 * estimates[arg_min].se;
    v.rate_bound_ok = true;
    if (v.strongly_connected)
        for (const auto& av : v.agents) v.rate_bound_ok = v.rate_bound_ok && av.within_M;

    if (v.strongly_connected && estimates.size() > 1) {
        v.spread = estimates[arg_max].rate - estimates[arg_min].rate;
        if (curve != nullptr && !curve->exact()) {
            v.equal_rates_applicable = true;
            v.spread_joint_se = bootstrap_difference_se(
                *curve, estimates[arg_max].agent, estimates[arg_min].agent,
                estimates[arg_max].window, estimates[arg_min].window, method, opt);
            v.equal_rates_ok = v.spread <= 2.0 * v.spread_joint_se;
        }
    }
    return v;
}

} // namespace netlearn
