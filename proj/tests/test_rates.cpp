#include <doctest.h>

#include <cmath>

#include "netlearn/dynamics.hpp"
#include "netlearn/rates.hpp"
#include "netlearn/theory.hpp"

using namespace netlearn;

namespace {

// synthetic exact curve P(t) = c * exp(-rho t)
MistakeCurve exponential_curve(double c, double rho, std::size_t T) {
    MistakeCurve curve(CurveMode::exact_forward, 1, T);
    for (std::size_t t = 1; t <= T; ++t) {
        const double p = c * std::exp(-rho * static_cast<double>(t));
        curve.set_exact(0, t - 1, p, p);
    }
    return curve;
}

// synthetic Monte Carlo curve from given per-period mistake counts
MistakeCurve mc_curve_from_counts(const std::vector<std::uint64_t>& mist, std::uint64_t trials,
                                  std::size_t blocks) {
    const std::size_t T = mist.size();
    MistakeCurve curve(CurveMode::monte_carlo, 1, T);
    for (std::size_t b = 0; b < blocks; ++b) {
        BlockCounts bc;
        bc.trials_g = trials / (2 * blocks);
        bc.trials_b = trials / (2 * blocks);
        bc.mistakes_g.assign(T, 0);
        bc.mistakes_b.assign(T, 0);
        for (std::size_t t = 0; t < T; ++t) {
            bc.mistakes_g[t] = mist[t] / (2 * blocks);
            bc.mistakes_b[t] = mist[t] / (2 * blocks);
        }
        curve.merge_block(b, bc);
    }
    return curve;
}

} // namespace

TEST_SUITE("rates") {
    TEST_CASE("exact exponential input recovers the exponent exactly") {
        MistakeCurve c = exponential_curve(0.4, 0.37, 30);
        for (auto m : {RateMethod::ols_log, RateMethod::endpoint}) {
            RateEstimate e = estimate_rate(c, 0, RateWindow{5, 25}, m);
            CHECK(std::abs(e.rate - 0.37) < 1e-12);
            CHECK(e.se == 0.0); // exact mode
        }
        RateEstimate e = estimate_rate(c, 0, RateWindow{1, 30}, RateMethod::ols_log);
        CHECK(e.r_squared == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(e.residual_trend) < 1e-12);
    }

    TEST_CASE("single-agent exact curve: slope within 2% of the autarky rate") {
        SignalModel m = make_symmetric_binary(0.9);
        const double ra = autarky_rate(m);
        MistakeCurve c = single_agent_exact_mistakes(m, 200);
        RateEstimate ols = estimate_rate(c, 0, RateWindow{50, 200}, RateMethod::ols_log);
        CHECK(std::abs(ols.rate - ra) / ra < 0.02);
        RateEstimate ep = estimate_rate(c, 0, RateWindow{50, 200}, RateMethod::endpoint);
        CHECK(std::abs(ep.rate - ra) / ra < 0.02);
        // the two estimators agree within 1% on deep windows
        CHECK(std::abs(ols.rate - ep.rate) / ra < 0.01);
    }

    TEST_CASE("uninformative signals estimate a zero rate") {
        SignalModel m = make_symmetric_binary(0.5);
        Network net = make_topology(Topology::autarky, 1);
        MonteCarloOptions opt;
        opt.trials = 20000;
        opt.seed = 9;
        auto mc = run_monte_carlo(m, net, 10, EngineChoice::automatic, opt);
        RateEstimate e = estimate_rate(mc.curve, 0, RateMethod::ols_log);
        // the realized curve is exactly flat (the tie action is played every
        // period, so mistakes happen iff theta = b), hence rate and bootstrap
        // se are both exactly zero
        CHECK(std::abs(e.rate) < 2 * e.se + 1e-6);

        // a mildly informative signal has genuine sampling noise; the
        // estimate must match the exact curve's slope over the same window
        SignalModel m6 = make_symmetric_binary(0.6);
        auto mc6 = run_monte_carlo(m6, net, 10, EngineChoice::automatic, opt);
        RateEstimate e6 = estimate_rate(mc6.curve, 0, RateMethod::ols_log);
        CHECK(e6.se > 0.0);
        RateEstimate oracle = estimate_rate(single_agent_exact_mistakes(m6, 10), 0, e6.window,
                                            RateMethod::ols_log);
        CHECK(std::abs(e6.rate - oracle.rate) < 4 * e6.se);
    }

    TEST_CASE("estimates are invariant under rescaling trial counts") {
        // counts divisible by the block split so both curves carry the same
        // per-block proportions; the estimator sees identical p_hat values
        std::vector<std::uint64_t> mist{4000, 1500, 600, 230, 90};
        MistakeCurve a = mc_curve_from_counts(mist, 100000, 5);
        std::vector<std::uint64_t> mist10;
        for (auto v : mist) mist10.push_back(v * 10);
        MistakeCurve b = mc_curve_from_counts(mist10, 1000000, 5);
        RateEstimate ea = estimate_rate(a, 0, RateWindow{1, 5}, RateMethod::ols_log);
        RateEstimate eb = estimate_rate(b, 0, RateWindow{1, 5}, RateMethod::ols_log);
        CHECK(std::abs(ea.rate - eb.rate) < 1e-12);
        CHECK(std::abs(ea.rate - estimate_rate(a, 0, RateWindow{1, 5}, RateMethod::endpoint).rate) <
              0.2); // same data, same order of magnitude
    }

    TEST_CASE("window selection respects the mistake floor") {
        // counts dip below 50 at t=4: the largest contiguous usable window
        // is [1, 3]
        std::vector<std::uint64_t> mist{4000, 1500, 600, 20, 90, 80};
        MistakeCurve c = mc_curve_from_counts(mist, 100000, 10);
        RateWindow w = auto_window(c, 0);
        CHECK(w.t_min == 1);
        CHECK(w.t_max == 3);
        CHECK_THROWS_AS(estimate_rate(c, 0, RateWindow{1, 6}, RateMethod::ols_log), ConfigError);
        // explicit floor override
        RateOptions relaxed;
        relaxed.mistake_floor = 1;
        CHECK_NOTHROW(estimate_rate(c, 0, RateWindow{1, 6}, RateMethod::ols_log, relaxed));
    }

    TEST_CASE("degenerate windows are errors") {
        MistakeCurve c = exponential_curve(0.4, 0.3, 10);
        CHECK_THROWS_AS(estimate_rate(c, 0, RateWindow{5, 5}, RateMethod::ols_log), ConfigError);
        CHECK_THROWS_AS(estimate_rate(c, 0, RateWindow{5, 11}, RateMethod::ols_log), ConfigError);
        // exact curve with zero cells has no usable window
        MistakeCurve z(CurveMode::exact_forward, 1, 4);
        CHECK_THROWS_AS(auto_window(z, 0), ConfigError);
    }

    TEST_CASE("equal-rates spread shrinks with window depth at delta = 0") {
        // asymmetric strongly connected three-agent network
        std::vector<std::pair<std::uint32_t, std::uint32_t>> edges{{1, 2}, {2, 1}, {2, 3}, {3, 1}};
        Network net = make_topology(Topology::custom, 3, &edges);
        REQUIRE(is_strongly_connected(net));
        SignalModel m = make_symmetric_binary(0.9);
        MistakeCurve ex = run_exact_forward(m, net, 6, EngineChoice::automatic);
        auto spread = [&](RateWindow w) {
            double lo = 1e30, hi = -1e30;
            for (std::size_t i = 0; i < 3; ++i) {
                RateEstimate e = estimate_rate(ex, i, w, RateMethod::ols_log);
                lo = std::min(lo, e.rate);
                hi = std::max(hi, e.rate);
            }
            return hi - lo;
        };
        CHECK(spread({2, 6}) < spread({2, 5}));
    }

    TEST_CASE("bounds verdict on a complete network") {
        SignalModel m = make_symmetric_binary(0.9);
        Network net = make_topology(Topology::complete, 3);
        RateBounds bounds = compute_bounds(m);
        MonteCarloOptions opt;
        opt.trials = 300000;
        opt.seed = 21;
        const std::size_t T = 10;
        auto mc = run_monte_carlo(m, net, T, EngineChoice::automatic, opt);
        std::vector<RateEstimate> ests;
        for (std::size_t i = 0; i < 3; ++i)
            ests.push_back(estimate_rate(mc.curve, i, RateMethod::ols_log));
        BoundsVerdict v = compare_to_bounds(ests, bounds, net, &mc.curve);
        CHECK(v.strongly_connected);
        CHECK(v.rate_bound_ok); // rates ~1 << M = 4.39
        CHECK(v.min_rate_ok);
        CHECK(v.equal_rates_applicable);
        CHECK(v.equal_rates_ok); // symmetric agents, paired bootstrap
        CHECK(v.public_rate == doctest::Approx(3 * bounds.r_a));
        for (const auto& av : v.agents) CHECK(av.within_M);
    }

    TEST_CASE("bounds verdict on a star picks the slow peripheral") {
        SignalModel m = make_symmetric_binary(0.9);
        Network net = make_topology(Topology::star, 4);
        RateBounds bounds = compute_bounds(m);
        MonteCarloOptions opt;
        opt.trials = 200000;
        opt.seed = 23;
        auto mc = run_monte_carlo(m, net, 8, EngineChoice::automatic, opt);
        std::vector<RateEstimate> ests;
        for (std::size_t i = 0; i < 4; ++i)
            ests.push_back(estimate_rate(mc.curve, i, RateMethod::ols_log));
        BoundsVerdict v = compare_to_bounds(ests, bounds, net, &mc.curve);
        CHECK(!v.strongly_connected);
        CHECK(v.min_rate_ok);
        CHECK(!v.equal_rates_applicable); // not strongly connected
        // the slowest agent is a peripheral, not the center
        CHECK(v.argmin_agent != 0);
    }

    TEST_CASE("verdict needs one estimate per agent") {
        SignalModel m = make_symmetric_binary(0.9);
        Network net = make_topology(Topology::complete, 3);
        std::vector<RateEstimate> two(2);
        CHECK_THROWS_AS(compare_to_bounds(two, compute_bounds(m), net), ConfigError);
    }
}
