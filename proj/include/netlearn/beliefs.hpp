// Belief bookkeeping shared by all inference engines.
//
// For agent i at period t (after seeing its own signals s_1..s_t and the
// actions of its neighborhood through t-1):
//   L = log-odds of the posterior on state g,
//   S = social likelihood: log-odds an outside observer would hold after
//       seeing only the neighborhood action history (own actions included,
//       since every agent observes itself),
//   P = private likelihood: L - S, the contribution of the agent's own
//       signals beyond what the action history already reveals.
// The decomposition L = S + P holds at every period, and |P| <= M * t.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "netlearn/common.hpp"
#include "netlearn/signal_model.hpp"

namespace netlearn {

struct BeliefState {
    double p = 0.5; // posterior probability of state g
    double L = 0.0; // posterior log-odds (nats)
    double S = 0.0; // social likelihood (nats)
    double P = 0.0; // private likelihood (nats)
};

// g when p >= 1/2, b otherwise; exact indifference resolved by the tie rule.
inline Action myopic_action(const BeliefState& belief, TieRule tie = {}) {
    return action_from_llr(belief.L, tie);
}

// One simulated run: realized state, signals, actions and beliefs per
// agent and period, with numerically-tied actions flagged.
struct TrajectoryRecord {
    State theta = State::g;
    std::size_t n = 0;
    std::size_t horizon = 0;
    SignalMatrix signals;
    std::vector<Action> actions;      // [agent * horizon + t]
    std::vector<BeliefState> beliefs; // [agent * horizon + t]
    std::vector<std::uint8_t> tied;   // [agent * horizon + t]

    TrajectoryRecord() = default;
    TrajectoryRecord(std::size_t n_, std::size_t T_)
        : n(n_), horizon(T_), actions(n_ * T_, Action::b), beliefs(n_ * T_), tied(n_ * T_, 0) {}

    // Reshape for reuse without releasing capacity.
    void reset(std::size_t n_, std::size_t T_) {
        n = n_;
        horizon = T_;
        actions.assign(n_ * T_, Action::b);
        beliefs.assign(n_ * T_, BeliefState{});
        tied.assign(n_ * T_, 0);
    }

    std::size_t idx(std::size_t agent, std::size_t t) const { return agent * horizon + t; }
    Action action(std::size_t agent, std::size_t t) const { return actions[idx(agent, t)]; }
    const BeliefState& belief(std::size_t agent, std::size_t t) const {
        return beliefs[idx(agent, t)];
    }
    bool is_tied(std::size_t agent, std::size_t t) const { return tied[idx(agent, t)] != 0; }
};

} // namespace netlearn
