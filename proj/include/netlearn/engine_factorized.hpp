// Exact inference on complete networks with stationary binary signals.
//
// On a complete network every action is public, so conditional on the public
// action history the agents' signal streams stay independent, and each
// agent's stream matters only through its count of index-0 symbols. The
// engine keeps one CountFilter per agent; writing G_j for agent j's filter
// log-mass ratio, the beliefs at period t are
//
//   L_i = ownLLR_i + sum_{j != i} G_j      (posterior log-odds)
//   S_i = sum_j G_j                        (outside observer of all actions)
//   P_i = ownLLR_i - G_i                   (own signals beyond the actions)
//
// which makes a horizon cost of O(n T^2) per run instead of the generic
// engine's exponential enumeration. Observable output is identical to the
// generic engine wherever both apply.
//
// exact_forward() computes the full mistake curve with no sampling by
// expanding the tree of reachable public histories. Histories are merged by
// their sufficient statistic: the per-agent integer counts of signal
// sequences consistent with the history, per count value. The integers stay
// exact in 64 bits for horizons up to 62, which bounds the supported T.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "netlearn/beliefs.hpp"
#include "netlearn/common.hpp"
#include "netlearn/count_filter.hpp"
#include "netlearn/curve.hpp"
#include "netlearn/network.hpp"
#include "netlearn/signal_model.hpp"

namespace netlearn {

inline constexpr std::uint64_t kDefaultNodeBudget = std::uint64_t{1} << 21;

class FactorizedCompleteEngine {
public:
    FactorizedCompleteEngine(const SignalModel& model, const Network& net, std::size_t T,
                             TieRule tie = {})
        : model_(model), net_(net), T_(T), tie_(tie) {
        if (!net.is_complete())
            throw ConfigError("factorized engine requires a complete network");
        if (!model.is_stationary_binary())
            throw ConfigError("factorized engine requires a stationary binary signal model");
        if (T < 1) throw ConfigError("factorized engine: need T >= 1");
        n_ = net.size();
        const SignalTable& tab = model.table(0, 0);
        qg_ = tab.dist_g[0];
        qb_ = tab.dist_b[0];
        l0_ = tab.llr[0];
        l1_ = tab.llr[1];
    }

    std::size_t agents() const { return n_; }
    std::size_t horizon() const { return T_; }

    // Reusable per-worker buffers for the Monte Carlo hot path.
    struct Scratch {
        std::vector<CountFilter> filters;
        std::vector<std::size_t> count;
        std::vector<double> G;
        std::vector<Action> acts;
    };
    Scratch make_scratch() const {
        return Scratch{std::vector<CountFilter>(n_, CountFilter(T_)),
                       std::vector<std::size_t>(n_, 0), std::vector<double>(n_, 0.0),
                       std::vector<Action>(n_)};
    }

    TrajectoryRecord run(const SignalMatrix& signals, State theta) const {
        TrajectoryRecord rec;
        Scratch scratch = make_scratch();
        run_into(signals, theta, rec, scratch);
        return rec;
    }

    void run_into(const SignalMatrix& signals, State theta, TrajectoryRecord& rec,
                  Scratch& scratch) const {
        if (signals.n != n_ || signals.horizon != T_)
            throw ConfigError("factorized engine: signal matrix shape mismatch");
        rec.reset(n_, T_);
        rec.theta = theta;
        rec.signals = signals;

        auto& filters = scratch.filters;
        auto& count = scratch.count;
        auto& G = scratch.G;
        auto& acts = scratch.acts;
        for (std::size_t j = 0; j < n_; ++j) filters[j].reset();
        std::fill(count.begin(), count.end(), 0);

        for (std::size_t t = 1; t <= T_; ++t) {
            double Gsum = 0.0;
            for (std::size_t j = 0; j < n_; ++j) {
                filters[j].extend(qg_, qb_);
                G[j] = filters[j].log_mass_ratio();
                Gsum += G[j];
                if (signals.at(j, t - 1) == 0) ++count[j];
            }
            for (std::size_t i = 0; i < n_; ++i) {
                const double own = own_llr(count[i], t);
                BeliefState bs;
                bs.L = own + (Gsum - G[i]);
                bs.S = Gsum;
                bs.P = own - G[i];
                bs.p = sigmoid(bs.L);
                acts[i] = action_from_llr(bs.L, tie_);
                const std::size_t k = rec.idx(i, t - 1);
                rec.beliefs[k] = bs;
                rec.actions[k] = acts[i];
                rec.tied[k] = std::abs(bs.L) <= kTieEps ? 1 : 0;
            }
            for (std::size_t j = 0; j < n_; ++j) {
                const double social = Gsum - G[j];
                filters[j].filter(
                    [&](std::size_t c) {
                        return action_from_llr(social + own_llr(c, t), tie_);
                    },
                    acts[j]);
            }
        }
    }

    // Exact mistake curve by forward expansion over reachable public
    // histories. No pruning: exceeding the node budget is an error.
    MistakeCurve exact_forward(std::uint64_t node_budget = kDefaultNodeBudget) const {
        if (T_ > 62)
            throw ResourceError("factorized exact forward supports T <= 62 (integer "
                                "sequence counts exceed 64 bits beyond that)");
        // A node is the per-agent table of consistent-sequence counts (per
        // count value, over the t-1 signals so far), flattened to one key;
        // the mapped value is how many public histories share that table.
        struct VecHash {
            std::size_t operator()(const std::vector<std::uint64_t>& v) const {
                std::uint64_t h = 0xcbf29ce484222325ULL;
                for (auto x : v) {
                    h ^= x;
                    h *= 0x100000001b3ULL;
                }
                return static_cast<std::size_t>(h);
            }
        };

        MistakeCurve curve(CurveMode::exact_forward, n_, T_);
        std::vector<double> mg(n_ * T_, 0.0), mb(n_ * T_, 0.0);

        std::unordered_map<std::vector<std::uint64_t>, double, VecHash> level;
        level[std::vector<std::uint64_t>(n_, 1)] = 1.0; // t=1: one empty sequence each
        std::uint64_t nodes_processed = 0;

        // Precomputed powers of the symbol probabilities.
        std::vector<double> pg0(T_ + 1), pg1(T_ + 1), pb0(T_ + 1), pb1(T_ + 1);
        pg0[0] = pg1[0] = pb0[0] = pb1[0] = 1.0;
        for (std::size_t k = 1; k <= T_; ++k) {
            pg0[k] = pg0[k - 1] * qg_;
            pg1[k] = pg1[k - 1] * (1.0 - qg_);
            pb0[k] = pb0[k - 1] * qb_;
            pb1[k] = pb1[k - 1] * (1.0 - qb_);
        }

        std::vector<double> zg(n_), zb(n_), G(n_);
        std::vector<double> badg(n_), badb(n_);
        for (std::size_t t = 1; t <= T_; ++t) {
            const std::size_t width = t + 1; // counts 0..t after extension
            std::unordered_map<std::vector<std::uint64_t>, double, VecHash> next;
            double total_g = 0.0, total_b = 0.0;
            for (auto& [key, weight] : level) {
                if (++nodes_processed > node_budget)
                    throw ResourceError(
                        "factorized exact forward node budget exceeded at t=" +
                        std::to_string(t) + " (budget " + std::to_string(node_budget) + ")");
                // Extend sequence counts by one signal (Pascal step), then
                // compute per-agent masses and mass ratios.
                std::vector<std::uint64_t> ext(n_ * width);
                for (std::size_t j = 0; j < n_; ++j) {
                    const std::uint64_t* old = key.data() + j * t;
                    std::uint64_t* row = ext.data() + j * width;
                    row[0] = old[0];
                    for (std::size_t c = 1; c < t; ++c) row[c] = old[c - 1] + old[c];
                    row[t] = old[t - 1];
                }
                double Gsum = 0.0;
                for (std::size_t j = 0; j < n_; ++j) {
                    const std::uint64_t* row = ext.data() + j * width;
                    double sg = 0.0, sb = 0.0;
                    for (std::size_t c = 0; c < width; ++c) {
                        if (row[c] == 0) continue;
                        const double k = static_cast<double>(row[c]);
                        sg += k * pg0[c] * pg1[t - c];
                        sb += k * pb0[c] * pb1[t - c];
                    }
                    zg[j] = sg;
                    zb[j] = sb;
                    G[j] = std::log(sg) - std::log(sb);
                    Gsum += G[j];
                }
                // Product of all agents' masses, and with one agent left out.
                double prod_g = weight, prod_b = weight;
                for (std::size_t j = 0; j < n_; ++j) {
                    prod_g *= zg[j];
                    prod_b *= zb[j];
                }
                // Mistake mass at this period, and per-agent count partition.
                std::vector<std::uint8_t> act(n_ * width);
                for (std::size_t j = 0; j < n_; ++j) {
                    const std::uint64_t* row = ext.data() + j * width;
                    const double social = Gsum - G[j];
                    double bg = 0.0, bb = 0.0;
                    for (std::size_t c = 0; c < width; ++c) {
                        const Action a = action_from_llr(social + own_llr(c, t), tie_);
                        act[j * width + c] = static_cast<std::uint8_t>(a);
                        if (row[c] == 0) continue;
                        const double k = static_cast<double>(row[c]);
                        if (a != Action::g) bg += k * pg0[c] * pg1[t - c];
                        if (a != Action::b) bb += k * pb0[c] * pb1[t - c];
                    }
                    badg[j] = bg;
                    badb[j] = bb;
                }
                for (std::size_t i = 0; i < n_; ++i) {
                    mg[i * T_ + (t - 1)] += prod_g / zg[i] * badg[i];
                    mb[i * T_ + (t - 1)] += prod_b / zb[i] * badb[i];
                }
                total_g += prod_g;
                total_b += prod_b;

                if (t == T_) continue;
                // Children: one per achievable joint action profile. The
                // count partition is independent across agents, so achievable
                // profiles are the product of per-agent nonempty sides.
                std::vector<std::uint64_t> child(n_ * width);
                enumerate_children(ext, act, width, 0, child, weight, next);
            }
            if (std::abs(total_g - 1.0) > 1e-10 || std::abs(total_b - 1.0) > 1e-10)
                throw InvariantViolationError(
                    "factorized exact forward: history masses do not sum to 1 at t=" +
                    std::to_string(t));
            level.swap(next);
        }
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t t = 0; t < T_; ++t)
                curve.set_exact(i, t, mg[i * T_ + t], mb[i * T_ + t]);
        return curve;
    }

private:
    double own_llr(std::size_t count0, std::size_t t) const {
        return static_cast<double>(count0) * l0_ + static_cast<double>(t - count0) * l1_;
    }

    template <typename Map>
    void enumerate_children(const std::vector<std::uint64_t>& ext,
                            const std::vector<std::uint8_t>& act, std::size_t width,
                            std::size_t j, std::vector<std::uint64_t>& child, double weight,
                            Map& next) const {
        if (j == n_) {
            auto [it, inserted] = next.try_emplace(child, weight);
            if (!inserted) it->second += weight;
            return;
        }
        for (std::uint8_t a : {std::uint8_t{0}, std::uint8_t{1}}) {
            bool any = false;
            for (std::size_t c = 0; c < width; ++c) {
                const std::uint64_t v = act[j * width + c] == a ? ext[j * width + c] : 0;
                child[j * width + c] = v;
                any = any || v != 0;
            }
            if (any) enumerate_children(ext, act, width, j + 1, child, weight, next);
        }
    }

    const SignalModel& model_;
    const Network& net_;
    std::size_t T_;
    std::size_t n_ = 0;
    TieRule tie_;
    double qg_ = 0.5, qb_ = 0.5, l0_ = 0.0, l1_ = 0.0;
};

} // namespace netlearn
