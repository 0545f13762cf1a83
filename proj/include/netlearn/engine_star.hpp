// Exact inference on star networks with stationary binary signals.
//
// Peripheral agents observe only themselves, so they follow the autarkic
// count rule; their action paths are deterministic in their own signals.
// The center observes everyone: its posterior adds to its own count LLR the
// log-ratio of each peripheral's action-path probability under the two
// states, which is exactly the peripheral's CountFilter mass ratio. The
// center's own filter (its count partition under its public decision rule)
// supplies the social term an outside observer of all actions would hold.
// Output is identical to the generic engine wherever both run.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "netlearn/beliefs.hpp"
#include "netlearn/common.hpp"
#include "netlearn/count_filter.hpp"
#include "netlearn/network.hpp"
#include "netlearn/signal_model.hpp"

namespace netlearn {

class StarEngine {
public:
    StarEngine(const SignalModel& model, const Network& net, std::size_t T, TieRule tie = {})
        : model_(model), net_(net), T_(T), tie_(tie) {
        const long c = net.star_center();
        if (c < 0) throw ConfigError("star engine requires a star network");
        if (!model.is_stationary_binary())
            throw ConfigError("star engine requires a stationary binary signal model");
        if (T < 1) throw ConfigError("star engine: need T >= 1");
        center_ = static_cast<std::size_t>(c);
        n_ = net.size();
        const SignalTable& tab = model.table(0, 0);
        qg_ = tab.dist_g[0];
        qb_ = tab.dist_b[0];
        l0_ = tab.llr[0];
        l1_ = tab.llr[1];
    }

    std::size_t agents() const { return n_; }
    std::size_t horizon() const { return T_; }
    std::size_t center() const { return center_; }

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
            throw ConfigError("star engine: signal matrix shape mismatch");
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
            double Gp = 0.0; // sum over peripherals
            for (std::size_t j = 0; j < n_; ++j) {
                filters[j].extend(qg_, qb_);
                G[j] = filters[j].log_mass_ratio();
                if (j != center_) Gp += G[j];
                if (signals.at(j, t - 1) == 0) ++count[j];
            }
            for (std::size_t i = 0; i < n_; ++i) {
                const double own = own_llr(count[i], t);
                BeliefState bs;
                if (i == center_) {
                    bs.L = own + Gp;
                    bs.S = Gp + G[i];
                } else {
                    bs.L = own;
                    bs.S = G[i];
                }
                bs.P = own - G[i];
                bs.p = sigmoid(bs.L);
                acts[i] = action_from_llr(bs.L, tie_);
                const std::size_t k = rec.idx(i, t - 1);
                rec.beliefs[k] = bs;
                rec.actions[k] = acts[i];
                rec.tied[k] = std::abs(bs.L) <= kTieEps ? 1 : 0;
            }
            for (std::size_t j = 0; j < n_; ++j) {
                const double social = j == center_ ? Gp : 0.0;
                filters[j].filter(
                    [&](std::size_t c) {
                        return action_from_llr(social + own_llr(c, t), tie_);
                    },
                    acts[j]);
            }
        }
    }

private:
    double own_llr(std::size_t count0, std::size_t t) const {
        return static_cast<double>(count0) * l0_ + static_cast<double>(t - count0) * l1_;
    }

    const SignalModel& model_;
    const Network& net_;
    std::size_t T_;
    std::size_t n_ = 0;
    std::size_t center_ = 0;
    TieRule tie_;
    double qg_ = 0.5, qb_ = 0.5, l0_ = 0.0, l1_ = 0.0;
};

} // namespace netlearn
