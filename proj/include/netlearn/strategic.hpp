// Exhaustive finite-horizon verification of strategic-agent properties on
// micro games (n <= 3 agents, horizon 2 for full strategy enumeration,
// horizon 3 for one-shot deviation checks).
//
// A pure strategy for one agent maps decision keys to actions, where a key
// is (period, own signal prefix, observed actions of the other neighbors).
// Own past actions are not part of the key: they are implied by the strategy
// itself on shorter prefixes.
//
// Utilities are exact expectations: every state and signal matrix is played
// out and probability-weighted, flows discounted by delta with the (1-delta)
// normalization. At horizon 2 a unilateral deviation cannot move any other
// agent off its equilibrium path before the final period (first-period
// actions depend on nothing prior), which is what makes exhaustive deviation
// search and the one-shot mode at horizon 3 well defined without specifying
// off-path behavior for the non-deviators.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "netlearn/beliefs.hpp"
#include "netlearn/common.hpp"
#include "netlearn/engine_generic.hpp"
#include "netlearn/network.hpp"
#include "netlearn/signal_model.hpp"

namespace netlearn {

inline constexpr double kGainTol = 1e-12;

// Posterior-likelihood threshold beyond which an equilibrium action must be
// myopic: -log(1 - delta).
inline double patience_threshold(double delta) {
    if (delta < 0.0 || delta >= 1.0) throw ConfigError("patience threshold: need 0 <= delta < 1");
    return -std::log1p(-delta);
}

struct DecisionKey {
    std::size_t t = 1;            // 1-based period
    std::uint64_t prefix = 0;     // own signals through t, mixed radix
    std::uint64_t others_hist = 0; // non-self neighbor actions before t, bit-packed

    auto operator<=>(const DecisionKey&) const = default;
};

struct AgentStrategy {
    std::map<DecisionKey, Action> actions;

    Action at(const DecisionKey& key) const {
        auto it = actions.find(key);
        if (it == actions.end())
            throw std::logic_error("strategy table missing a reachable decision key (t=" +
                                   std::to_string(key.t) + ")");
        return it->second;
    }
};

using StrategyProfile = std::vector<AgentStrategy>;

struct MicroGame {
    SignalModel model;
    Network net;
    std::size_t horizon;
    double delta;
    TieRule tie{};

    MicroGame(SignalModel m, Network n, std::size_t T, double d, TieRule tr = {})
        : model(std::move(m)), net(std::move(n)), horizon(T), delta(d), tie(tr) {
        if (net.size() > 3) throw ConfigError("micro game: n <= 3");
        if (horizon < 1 || horizon > 3) throw ConfigError("micro game: horizon must be 1..3");
        if (delta < 0.0 || delta >= 1.0) throw ConfigError("micro game: 0 <= delta < 1");
        if (!model.is_binary()) throw ConfigError("micro game: binary signal models only");
    }
};

namespace micro_detail {

inline std::size_t alphabet_size(const MicroGame& game, std::size_t agent, std::size_t period) {
    return game.model.table(agent, period).size();
}

// key of agent i at period t given its signals and everyone's past actions
inline DecisionKey key_at(const MicroGame& game, std::size_t i, std::size_t t,
                          const SignalMatrix& mat, const std::vector<Action>& actions) {
    DecisionKey key;
    key.t = t;
    std::uint64_t mult = 1;
    for (std::size_t tau = 0; tau < t; ++tau) {
        key.prefix += mult * mat.at(i, tau);
        mult *= alphabet_size(game, i, tau);
    }
    std::size_t bit = 0;
    const std::size_t T = game.horizon;
    for (std::size_t tau = 0; tau + 1 < t; ++tau)
        for (auto j : game.net.neighbors(i)) {
            if (j == i) continue;
            if (actions[j * T + tau] == Action::g) key.others_hist |= std::uint64_t{1} << bit;
            ++bit;
        }
    return key;
}

// all decision keys of one agent, in deterministic order
inline std::vector<DecisionKey> key_space(const MicroGame& game, std::size_t i) {
    std::vector<DecisionKey> keys;
    const std::size_t others = game.net.neighbors(i).size() - 1;
    for (std::size_t t = 1; t <= game.horizon; ++t) {
        std::uint64_t prefixes = 1;
        for (std::size_t tau = 0; tau < t; ++tau) prefixes *= alphabet_size(game, i, tau);
        const std::uint64_t hists = std::uint64_t{1} << (others * (t - 1));
        for (std::uint64_t p = 0; p < prefixes; ++p)
            for (std::uint64_t h = 0; h < hists; ++h) keys.push_back({t, p, h});
    }
    return keys;
}

inline bool advance_matrix(const MicroGame& game, SignalMatrix& mat) {
    for (std::size_t j = 0; j < game.net.size(); ++j)
        for (std::size_t t = 0; t < game.horizon; ++t) {
            if (mat.at(j, t) + 1u < alphabet_size(game, j, t)) {
                ++mat.at(j, t);
                return true;
            }
            mat.at(j, t) = 0;
        }
    return false;
}

inline double matrix_weight(const MicroGame& game, const SignalMatrix& mat, State theta) {
    double w = 1.0;
    for (std::size_t j = 0; j < game.net.size(); ++j)
        for (std::size_t t = 0; t < game.horizon; ++t) {
            const SignalTable& tab = game.model.table(j, t);
            w *= theta == State::g ? tab.dist_g[mat.at(j, t)] : tab.dist_b[mat.at(j, t)];
        }
    return w;
}

// Play every agent from its table. When `focal` is set, the last period is
// evaluated for the focal agent only, so the tables of the others are never
// queried at information sets a unilateral deviation may have moved off the
// equilibrium path.
inline void play_profile(const MicroGame& game, const StrategyProfile& profile,
                         const SignalMatrix& mat, std::vector<Action>& actions,
                         std::size_t focal = static_cast<std::size_t>(-1)) {
    const std::size_t n = game.net.size(), T = game.horizon;
    for (std::size_t t = 1; t <= T; ++t)
        for (std::size_t j = 0; j < n; ++j) {
            if (t == T && focal != static_cast<std::size_t>(-1) && j != focal) continue;
            actions[j * T + (t - 1)] = profile[j].at(key_at(game, j, t, mat, actions));
        }
}

} // namespace micro_detail

// The myopic strategy profile: each agent plays the sign of its exact
// posterior at every information set reachable under myopic play.
inline StrategyProfile myopic_profile(const MicroGame& game,
                                      std::uint64_t enum_budget = kDefaultEnumBudget) {
    GenericEngine engine(game.model, game.net, game.horizon, enum_budget, game.tie);
    const std::size_t n = game.net.size(), T = game.horizon;
    StrategyProfile profile(n);
    SignalMatrix mat(n, T);
    do {
        TrajectoryRecord rec = engine.run(mat, State::g);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t t = 1; t <= T; ++t) {
                const DecisionKey key = micro_detail::key_at(game, i, t, mat, rec.actions);
                auto [it, inserted] = profile[i].actions.emplace(key, rec.action(i, t - 1));
                if (!inserted && it->second != rec.action(i, t - 1))
                    throw std::logic_error("myopic profile: conflicting actions for one "
                                           "decision key");
            }
    } while (micro_detail::advance_matrix(game, mat));
    return profile;
}

struct AgentUtility {
    double total = 0.0;              // (1-delta) sum_t delta^(t-1) u_t
    std::vector<double> per_period;  // u_t = P[a_t = theta]
};

// Exact expected utilities of a profile, by enumeration over states and
// signal matrices.
inline std::vector<AgentUtility> expected_utility(const MicroGame& game,
                                                  const StrategyProfile& profile) {
    const std::size_t n = game.net.size(), T = game.horizon;
    if (profile.size() != n) throw ConfigError("expected_utility: profile size mismatch");
    std::vector<AgentUtility> out(n);
    for (auto& u : out) u.per_period.assign(T, 0.0);

    std::vector<Action> actions(n * T);
    for (State theta : {State::g, State::b}) {
        SignalMatrix mat(n, T);
        do {
            const double w = 0.5 * micro_detail::matrix_weight(game, mat, theta);
            micro_detail::play_profile(game, profile, mat, actions);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t t = 0; t < T; ++t)
                    if (matches(actions[i * T + t], theta)) out[i].per_period[t] += w;
        } while (micro_detail::advance_matrix(game, mat));
    }
    for (std::size_t i = 0; i < n; ++i) {
        double disc = 1.0;
        for (std::size_t t = 0; t < T; ++t) {
            out[i].total += (1.0 - game.delta) * disc * out[i].per_period[t];
            disc *= game.delta;
        }
    }
    return out;
}

struct DeviationResult {
    double base_utility = 0.0;
    double best_utility = 0.0;
    double gain = 0.0;
    std::uint64_t strategies_searched = 0;
    AgentStrategy best;
};

// Exhaustive best response of one agent against the rest of the profile.
// Requires the full strategy space to be enumerable (horizon <= 2 in
// practice; the space doubles with every decision key).
inline DeviationResult best_deviation(const MicroGame& game, const StrategyProfile& profile,
                                      std::size_t deviator,
                                      std::uint64_t strategy_budget = std::uint64_t{1} << 22) {
    const std::size_t n = game.net.size(), T = game.horizon;
    if (deviator >= n) throw ConfigError("best_deviation: no such agent");
    if (T > 2 && n > 1)
        throw ConfigError("best_deviation: full strategy enumeration supports horizon <= 2 "
                          "(the one-shot mode covers horizon 3)");
    const std::vector<DecisionKey> keys = micro_detail::key_space(game, deviator);
    if (keys.size() >= 63 || (std::uint64_t{1} << keys.size()) > strategy_budget)
        throw ResourceError("best_deviation: strategy space 2^" + std::to_string(keys.size()) +
                            " exceeds the enumeration budget " +
                            std::to_string(strategy_budget));

    // At horizon <= 2 every other agent's actions are unaffected by the
    // deviator within the evaluation horizon, so the deviator's expected
    // utility is additive over its decision keys. Precompute each key's
    // contribution per action, then score all strategies exhaustively.
    std::map<DecisionKey, std::size_t> key_index;
    for (std::size_t k = 0; k < keys.size(); ++k) key_index.emplace(keys[k], k);
    std::vector<double> contrib_g(keys.size(), 0.0), contrib_b(keys.size(), 0.0);

    std::vector<Action> actions(n * T);
    for (State theta : {State::g, State::b}) {
        SignalMatrix mat(n, T);
        do {
            const double w = 0.5 * micro_detail::matrix_weight(game, mat, theta);
            micro_detail::play_profile(game, profile, mat, actions, deviator);
            double disc = 1.0 - game.delta;
            for (std::size_t t = 1; t <= T; ++t) {
                const DecisionKey key = micro_detail::key_at(game, deviator, t, mat, actions);
                const std::size_t k = key_index.at(key);
                if (theta == State::g)
                    contrib_g[k] += w * disc;
                else
                    contrib_b[k] += w * disc;
                disc *= game.delta;
            }
        } while (micro_detail::advance_matrix(game, mat));
    }

    DeviationResult result;
    const std::uint64_t total = std::uint64_t{1} << keys.size();
    double best = -1.0;
    std::uint64_t best_mask = 0;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        double u = 0.0;
        for (std::size_t k = 0; k < keys.size(); ++k)
            u += (mask >> k) & 1 ? contrib_g[k] : contrib_b[k];
        if (u > best) {
            best = u;
            best_mask = mask;
        }
        ++result.strategies_searched;
    }

    // utility of the profile's own table for the deviator, same route;
    // keys absent from the table are unreachable under the profile and
    // carry zero contribution
    double base = 0.0;
    for (std::size_t k = 0; k < keys.size(); ++k) {
        auto it = profile[deviator].actions.find(keys[k]);
        if (it == profile[deviator].actions.end()) continue;
        base += it->second == Action::g ? contrib_g[k] : contrib_b[k];
    }
    result.base_utility = base;
    result.best_utility = best;
    result.gain = best - base;
    for (std::size_t k = 0; k < keys.size(); ++k)
        result.best.actions.emplace(keys[k],
                                    ((best_mask >> k) & 1) ? Action::g : Action::b);
    return result;
}

// ---------------------------------------------------------------------------
// Beliefs under a fixed profile, and the patience-threshold check: in any
// equilibrium, an agent whose posterior log-odds reach -log(1-delta) in
// magnitude must play the myopic action.
// ---------------------------------------------------------------------------

struct ThresholdEntry {
    std::size_t agent = 0;
    std::size_t t = 0;
    double L = 0.0;
    Action played = Action::b;
    bool covered = false; // |L| >= threshold
    bool myopic = true;
};

struct ThresholdReport {
    double threshold = 0.0;
    std::uint64_t covered = 0;
    std::uint64_t below_threshold = 0;
    std::vector<ThresholdEntry> violations; // covered but non-myopic

    bool ok() const { return violations.empty(); }
};

// Enumerates every information set reachable under the profile, computes the
// exact Bayesian posterior there (actions convey information according to
// the profile itself), and checks the threshold rule. Sets with |L| below
// the threshold are counted but not judged.
inline ThresholdReport check_myopic_threshold(const MicroGame& game,
                                              const StrategyProfile& profile,
                                              std::uint64_t enum_budget = kDefaultEnumBudget) {
    const std::size_t n = game.net.size(), T = game.horizon;
    ThresholdReport report;
    report.threshold = patience_threshold(game.delta);

    // profile-conditional beliefs via the generic machinery: actions at each
    // bucket come from the profile tables
    std::vector<Action> scratch_actions(n * T);
    GenericEngine engine(
        game.model, game.net, T, enum_budget, game.tie,
        [&](std::size_t agent, std::size_t t, const InfoSetKey& key, double) {
            // recover the profile's action for this bucket: own prefix plus
            // the non-self action bits of the full history
            DecisionKey dk;
            dk.t = t;
            dk.prefix = key.prefix;
            const auto& nb = game.net.neighbors(agent);
            std::size_t bit_in = 0, bit_out = 0;
            for (std::size_t tau = 0; tau + 1 < t; ++tau)
                for (std::size_t k = 0; k < nb.size(); ++k, ++bit_in) {
                    if (nb[k] == agent) continue;
                    if ((key.history >> bit_in) & 1)
                        dk.others_hist |= std::uint64_t{1} << bit_out;
                    ++bit_out;
                }
            return profile[agent].at(dk);
        });

    SignalMatrix mat(n, T);
    std::map<std::tuple<std::size_t, std::size_t, std::uint64_t, std::uint64_t>, bool> seen;
    do {
        TrajectoryRecord rec = engine.run(mat, State::g);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t t = 1; t <= T; ++t) {
                const DecisionKey dk = micro_detail::key_at(game, i, t, mat, rec.actions);
                auto [it, inserted] =
                    seen.emplace(std::make_tuple(i, t, dk.prefix, dk.others_hist), true);
                if (!inserted) continue;
                ThresholdEntry entry;
                entry.agent = i;
                entry.t = t;
                entry.L = rec.belief(i, t - 1).L;
                entry.played = rec.action(i, t - 1);
                entry.covered = std::abs(entry.L) >= report.threshold - 1e-12;
                if (entry.covered) {
                    ++report.covered;
                    entry.myopic = entry.played == action_from_llr(entry.L, game.tie);
                    if (!entry.myopic) report.violations.push_back(entry);
                } else {
                    ++report.below_threshold;
                }
            }
    } while (micro_detail::advance_matrix(game, mat));
    return report;
}

// ---------------------------------------------------------------------------
// One-shot deviations at horizon 3: flip the action at a single decision key
// and play myopic continuations under the deviator's own (off-path) exact
// posterior. Necessary condition only.
// ---------------------------------------------------------------------------

struct OneShotCase {
    std::size_t agent = 0;
    DecisionKey key;
    double gain = 0.0;
};

struct OneShotReport {
    double max_gain = 0.0;
    std::uint64_t cases_checked = 0;
    std::vector<OneShotCase> profitable; // gain > tolerance

    bool ok() const { return profitable.empty(); }
};

namespace micro_detail {

// Posterior log-odds of `i` at period t given its signals and the full
// observed action history, with i's own past actions treated as given
// (possibly off the profile path) and everyone else playing the profile.
class DeviantPosterior {
public:
    DeviantPosterior(const MicroGame& game, const StrategyProfile& profile)
        : game_(game), profile_(profile) {}

    double llr(std::size_t i, std::size_t t, const SignalMatrix& mat,
               const std::vector<Action>& actions) {
        // cache on (i, t, own prefix, full action history through t-1)
        std::uint64_t own = 0, mult = 1, hist = 0;
        const std::size_t n = game_.net.size(), T = game_.horizon;
        for (std::size_t tau = 0; tau < t; ++tau) {
            own += mult * mat.at(i, tau);
            mult *= alphabet_size(game_, i, tau);
        }
        std::size_t bit = 0;
        for (std::size_t tau = 0; tau + 1 < t; ++tau)
            for (std::size_t j = 0; j < n; ++j, ++bit)
                if (actions[j * T + tau] == Action::g) hist |= std::uint64_t{1} << bit;
        const auto key = std::make_tuple(i, t, own, hist);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;

        double wg = 0.0, wb = 0.0;
        SignalMatrix alt = mat; // others' signals will be swept, i's kept
        sweep(i, t, alt, actions, wg, wb);
        const double L = std::log(wg) - std::log(wb);
        cache_.emplace(key, L);
        return L;
    }

private:
    void sweep(std::size_t i, std::size_t t, SignalMatrix& alt,
               const std::vector<Action>& observed, double& wg, double& wb) {
        const std::size_t n = game_.net.size(), T = game_.horizon;
        // slots: others' signals at periods up to t-1
        std::vector<std::pair<std::size_t, std::size_t>> slots;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i)
                for (std::size_t tau = 0; tau + 1 < t; ++tau) slots.push_back({j, tau});
        std::vector<std::size_t> radix(slots.size());
        for (std::size_t s = 0; s < slots.size(); ++s)
            radix[s] = alphabet_size(game_, slots[s].first, slots[s].second);
        std::vector<std::size_t> digits(slots.size(), 0);
        std::vector<Action> play(n * T);
        for (;;) {
            for (std::size_t s = 0; s < slots.size(); ++s)
                alt.at(slots[s].first, slots[s].second) = static_cast<std::uint8_t>(digits[s]);
            // play others with the profile, i's actions pinned to observed
            bool consistent = true;
            for (std::size_t tau = 1; tau + 1 <= t && consistent; ++tau) {
                for (std::size_t j = 0; j < n; ++j) {
                    if (j == i) {
                        play[j * T + (tau - 1)] = observed[j * T + (tau - 1)];
                        continue;
                    }
                    play[j * T + (tau - 1)] =
                        profile_[j].at(key_at(game_, j, tau, alt, play));
                    if (play[j * T + (tau - 1)] != observed[j * T + (tau - 1)]) {
                        consistent = false;
                        break;
                    }
                }
            }
            if (consistent) {
                double vg = 1.0, vb = 1.0;
                for (std::size_t s = 0; s < slots.size(); ++s) {
                    const SignalTable& tab =
                        game_.model.table(slots[s].first, slots[s].second);
                    vg *= tab.dist_g[digits[s]];
                    vb *= tab.dist_b[digits[s]];
                }
                for (std::size_t tau = 0; tau < t; ++tau) {
                    const SignalTable& tab = game_.model.table(i, tau);
                    vg *= tab.dist_g[alt.at(i, tau)];
                    vb *= tab.dist_b[alt.at(i, tau)];
                }
                wg += vg;
                wb += vb;
            }
            // advance odometer
            std::size_t s = 0;
            for (; s < digits.size(); ++s) {
                if (++digits[s] < radix[s]) break;
                digits[s] = 0;
            }
            if (s == digits.size()) break;
        }
    }

    const MicroGame& game_;
    const StrategyProfile& profile_;
    std::map<std::tuple<std::size_t, std::size_t, std::uint64_t, std::uint64_t>, double> cache_;
};

} // namespace micro_detail

inline OneShotReport one_shot_deviation_check(const MicroGame& game,
                                              const StrategyProfile& profile) {
    const std::size_t n = game.net.size(), T = game.horizon;
    OneShotReport report;
    const std::vector<AgentUtility> base = expected_utility(game, profile);
    micro_detail::DeviantPosterior posterior(game, profile);

    for (std::size_t i = 0; i < n; ++i) {
        for (const DecisionKey& key0 : micro_detail::key_space(game, i)) {
            // utility of flipping the action at key0, myopic afterwards
            double udev = 0.0;
            std::vector<Action> actions(n * T);
            for (State theta : {State::g, State::b}) {
                SignalMatrix mat(n, T);
                do {
                    const double w = 0.5 * micro_detail::matrix_weight(game, mat, theta);
                    bool deviated = false;
                    for (std::size_t t = 1; t <= T; ++t) {
                        for (std::size_t j = 0; j < n; ++j) {
                            if (t == T && j != i) continue; // last period: focal only
                            if (j != i) {
                                actions[j * T + (t - 1)] =
                                    profile[j].at(micro_detail::key_at(game, j, t, mat, actions));
                                continue;
                            }
                            const DecisionKey key = micro_detail::key_at(game, i, t, mat, actions);
                            Action a;
                            if (!deviated && key == key0) {
                                const Action base_action = profile[i].at(key);
                                a = base_action == Action::g ? Action::b : Action::g;
                                deviated = true;
                            } else if (deviated) {
                                a = action_from_llr(posterior.llr(i, t, mat, actions), game.tie);
                            } else {
                                a = profile[i].at(key);
                            }
                            actions[i * T + (t - 1)] = a;
                        }
                    }
                    double disc = 1.0 - game.delta;
                    for (std::size_t t = 0; t < T; ++t) {
                        if (matches(actions[i * T + t], theta)) udev += w * disc;
                        disc *= game.delta;
                    }
                } while (micro_detail::advance_matrix(game, mat));
            }
            ++report.cases_checked;
            const double gain = udev - base[i].total;
            report.max_gain = std::max(report.max_gain, gain);
            if (gain > kGainTol) report.profitable.push_back({i, key0, gain});
        }
    }
    return report;
}

} // namespace netlearn
