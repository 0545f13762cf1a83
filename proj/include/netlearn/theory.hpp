// Closed-form and numeric benchmarks the simulations are compared against:
//
//   autarky_rate  r_a = sup_{z in [0,1]} -log sum_w mu_g(w)^z mu_b(w)^(1-z),
//                 the Chernoff information between the two conditional signal
//                 distributions; a lone agent's mistake probability decays at
//                 this rate.
//   bound M       twice the largest absolute per-signal log-likelihood ratio;
//                 the universal cap on the equilibrium learning rate.
//   crossover_n   smallest n at which the public-signal benchmark n * r_a
//                 exceeds M.
//
// plus the exact single-agent mistake curve (binomial tails in log space).
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "netlearn/common.hpp"
#include "netlearn/curve.hpp"
#include "netlearn/signal_model.hpp"

namespace netlearn {

struct RateBounds {
    double r_a = 0.0;          // nats per period
    double M = 0.0;            // nats
    std::size_t crossover_n = 0; // 0 when r_a == 0 (no crossover)

    double public_benchmark(std::size_t n) const { return static_cast<double>(n) * r_a; }
};

namespace detail {

// -log sum_w mu_g(w)^z mu_b(w)^(1-z), concave in z on [0,1].
inline double chernoff_objective(const SignalTable& t, double z) {
    double acc = kNegInf;
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double lg = std::log(t.dist_g[k]);
        const double lb = std::log(t.dist_b[k]);
        acc = log_sum_exp(acc, z * lg + (1.0 - z) * lb);
    }
    return -acc;
}

} // namespace detail

// Chernoff information via golden-section search on [0,1]. The objective is
// smooth and unimodal; the search brackets the maximizer to |z - z*| < 1e-10.
inline double autarky_rate(const SignalModel& model) {
    if (!model.is_stationary())
        throw ConfigError("autarky_rate requires a stationary signal model");
    const SignalTable& t = model.table(0, 0);

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 0.0, b = 1.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = detail::chernoff_objective(t, x1);
    double f2 = detail::chernoff_objective(t, x2);
    for (int it = 0; it < 200 && (b - a) > 1e-10; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = detail::chernoff_objective(t, x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = detail::chernoff_objective(t, x1);
        }
    }
    const double best = std::max(f1, f2);
    // The objective evaluates to rounding noise (~1e-16) when the two
    // distributions coincide; clamp so uninformative models report exactly 0.
    return best > 1e-12 ? best : 0.0;
}

// Smallest integer n with n * r_a > M.
inline std::size_t crossover_n(const SignalModel& model) {
    const double ra = autarky_rate(model);
    if (ra <= 0.0)
        throw ConfigError("crossover_n: autarky rate is zero (uninformative signal)");
    const double M = model.bound_M();
    auto n = static_cast<std::size_t>(std::floor(M / ra));
    while (static_cast<double>(n) * ra <= M) ++n;
    return n;
}

inline RateBounds compute_bounds(const SignalModel& model) {
    RateBounds rb;
    rb.r_a = autarky_rate(model);
    rb.M = model.bound_M();
    rb.crossover_n = rb.r_a > 0.0 ? crossover_n(model) : 0;
    return rb;
}

namespace detail {

inline double log_choose(std::size_t n, std::size_t k) {
    return std::lgamma(static_cast<double>(n + 1)) - std::lgamma(static_cast<double>(k + 1)) -
           std::lgamma(static_cast<double>(n - k + 1));
}

} // namespace detail

// Exact mistake probabilities of a lone myopic agent with a stationary binary
// signal. The posterior depends on the signals only through the count of
// index-0 symbols, so P[a_t != theta] is a binomial tail sum; it is formed in
// log space and exponentiated once per period.
inline MistakeCurve single_agent_exact_mistakes(const SignalModel& model, std::size_t T,
                                                TieRule tie = {}) {
    if (!model.is_stationary_binary())
        throw ConfigError("single_agent_exact_mistakes requires a stationary binary model");
    if (T < 1) throw ConfigError("single_agent_exact_mistakes: need T >= 1");
    const SignalTable& tab = model.table(0, 0);
    const double l0 = tab.llr[0], l1 = tab.llr[1];
    const double qg = tab.dist_g[0], qb = tab.dist_b[0]; // P[symbol 0 | state]

    MistakeCurve curve(CurveMode::analytic, 1, T);
    for (std::size_t t = 1; t <= T; ++t) {
        double log_mg = kNegInf, log_mb = kNegInf;
        for (std::size_t c = 0; c <= t; ++c) {
            const double L = static_cast<double>(c) * l0 + static_cast<double>(t - c) * l1;
            const Action act = action_from_llr(L, tie);
            const double lc = detail::log_choose(t, c);
            if (act != Action::g)
                log_mg = log_sum_exp(log_mg, lc + static_cast<double>(c) * std::log(qg) +
                                                  static_cast<double>(t - c) * std::log(1.0 - qg));
            if (act != Action::b)
                log_mb = log_sum_exp(log_mb, lc + static_cast<double>(c) * std::log(qb) +
                                                  static_cast<double>(t - c) * std::log(1.0 - qb));
        }
        curve.set_exact(0, t - 1, std::exp(log_mg), std::exp(log_mb));
    }
    return curve;
}

} // namespace netlearn
