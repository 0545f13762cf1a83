// Exact Bayesian inference on arbitrary observation networks by weighted
// enumeration. Feasible only for tiny instances; serves as the ground-truth
// oracle the specialized engines are checked against.
//
// Construction builds, by induction on the period, the myopic action map of
// every agent: the posterior at an information set (own signal prefix,
// observed action history) is obtained by enumerating all signal matrices,
// playing them forward with the maps already built for earlier periods, and
// accumulating each matrix's conditional probability into the bucket of the
// information set it produces for the agent. Buckets keyed by the observed
// history alone give the outside observer's likelihood (the social term S).
//
// All bucket accumulation is done in log space with log-sum-exp.
//
// The work is metered in weighted enumeration steps (matrix cells visited);
// exceeding the budget raises ResourceError before any work is done, naming
// the offending instance. Posterior queries for information sets that cannot
// arise under the dynamics are hard errors, never silent defaults.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "netlearn/beliefs.hpp"
#include "netlearn/common.hpp"
#include "netlearn/curve.hpp"
#include "netlearn/network.hpp"
#include "netlearn/signal_model.hpp"

namespace netlearn {

inline constexpr std::uint64_t kDefaultEnumBudget = std::uint64_t{1} << 26;

// Information-set key: own signal prefix (mixed-radix code) plus observed
// neighborhood action history (one bit per neighbor per past period).
struct InfoSetKey {
    std::uint64_t prefix = 0;
    std::uint64_t history = 0;
    bool operator==(const InfoSetKey&) const = default;
};

struct InfoSetKeyHash {
    std::size_t operator()(const InfoSetKey& k) const {
        std::uint64_t h = k.prefix * 0x9E3779B97F4A7C15ULL;
        h ^= k.history + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h * 0xBF58476D1CE4E5B9ULL);
    }
};

struct PosteriorBucket {
    double log_wg = kNegInf; // log P[prefix, history | g]
    double log_wb = kNegInf; // log P[prefix, history | b]
    Action action = Action::b;

    double llr() const { return log_wg - log_wb; }
};

struct ObserverBucket {
    double log_vg = kNegInf; // log P[history | g]
    double log_vb = kNegInf; // log P[history | b]

    double llr() const { return log_vg - log_vb; }
};

class GenericEngine {
public:
    // Assigns the action taken at an information set, given the posterior
    // log-odds there. The default builds the myopic profile; the strategic
    // module substitutes fixed strategy tables.
    using ActionSource =
        std::function<Action(std::size_t agent, std::size_t t, const InfoSetKey&, double llr)>;

    GenericEngine(const SignalModel& model, const Network& net, std::size_t T,
                  std::uint64_t budget = kDefaultEnumBudget, TieRule tie = {},
                  ActionSource action_source = nullptr)
        : model_(model), net_(net), T_(T), tie_(tie) {
        if (T < 1) throw ConfigError("generic engine: need T >= 1");
        n_ = net.size();
        radix_.assign(n_ * T_, 0);
        for (std::size_t j = 0; j < n_; ++j)
            for (std::size_t t = 0; t < T_; ++t)
                radix_[j * T_ + t] = model.table(j, t).size();

        check_widths();
        const std::uint64_t needed = predicted_steps();
        if (needed > budget)
            throw ResourceError(
                "generic engine enumeration budget exceeded: n=" + std::to_string(n_) +
                ", T=" + std::to_string(T_) + ", |Omega|=" + std::to_string(max_radix()) +
                " needs " + std::to_string(needed) + " weighted steps > budget " +
                std::to_string(budget));

        if (!action_source)
            action_source = [this](std::size_t, std::size_t, const InfoSetKey&, double llr) {
                return action_from_llr(llr, tie_);
            };
        build(action_source);
    }

    std::size_t agents() const { return n_; }
    std::size_t horizon() const { return T_; }
    std::uint64_t steps_used() const { return steps_; }

    // Posterior bucket at a reachable information set (periods 1-based).
    const PosteriorBucket& posterior_at(std::size_t agent, std::size_t t,
                                        const InfoSetKey& key) const {
        const auto& m = maps_[t - 1][agent];
        auto it = m.find(key);
        if (it == m.end())
            throw std::logic_error("generic engine: query for unreachable information set "
                                   "(agent " +
                                   std::to_string(agent + 1) + ", t=" + std::to_string(t) + ")");
        return it->second;
    }

    const ObserverBucket& observer_at(std::size_t agent, std::size_t t,
                                      std::uint64_t history) const {
        const auto& m = observers_[t - 1][agent];
        auto it = m.find(history);
        if (it == m.end())
            throw std::logic_error("generic engine: query for unreachable action history");
        return it->second;
    }

    // Play one realized signal matrix through the myopic dynamics.
    TrajectoryRecord run(const SignalMatrix& signals, State theta) const {
        TrajectoryRecord rec;
        run_into(signals, theta, rec);
        return rec;
    }

    void run_into(const SignalMatrix& signals, State theta, TrajectoryRecord& rec) const {
        if (signals.n != n_ || signals.horizon != T_)
            throw ConfigError("generic engine: signal matrix shape mismatch");
        rec.reset(n_, T_);
        rec.theta = theta;
        rec.signals = signals;

        std::vector<std::uint64_t> prefix(n_, 0), prefix_mult(n_, 1), hist(n_, 0);
        std::vector<std::size_t> hist_bits(n_, 0);
        for (std::size_t t = 1; t <= T_; ++t) {
            for (std::size_t i = 0; i < n_; ++i) {
                prefix[i] += prefix_mult[i] * signals.at(i, t - 1);
                prefix_mult[i] *= radix_[i * T_ + (t - 1)];
            }
            for (std::size_t i = 0; i < n_; ++i) {
                const PosteriorBucket& bucket = posterior_at(i, t, {prefix[i], hist[i]});
                const ObserverBucket& obs = observer_at(i, t, hist[i]);
                BeliefState bs;
                bs.L = bucket.llr();
                bs.S = obs.llr();
                bs.P = bs.L - bs.S;
                bs.p = sigmoid(bs.L);
                const std::size_t k = rec.idx(i, t - 1);
                rec.beliefs[k] = bs;
                rec.actions[k] = bucket.action;
                rec.tied[k] = std::abs(bs.L) <= kTieEps ? 1 : 0;
            }
            // fold this period's actions into each observer's history code
            for (std::size_t i = 0; i < n_; ++i) {
                const auto& nb = net_.neighbors(i);
                for (std::size_t k = 0; k < nb.size(); ++k) {
                    if (rec.action(nb[k], t - 1) == Action::g)
                        hist[i] |= std::uint64_t{1} << (hist_bits[i] + k);
                }
                hist_bits[i] += nb.size();
            }
        }
    }

    // Exact mistake probabilities by full enumeration: every signal matrix is
    // played out under both states and its probability accumulated wherever
    // the realized action mismatches the conditioning state.
    MistakeCurve exact_forward() const {
        MistakeCurve curve(CurveMode::exact_forward, n_, T_);
        std::vector<double> mg(n_ * T_, 0.0), mb(n_ * T_, 0.0);
        double total_g = 0.0, total_b = 0.0;

        SignalMatrix mat(n_, T_);
        std::vector<Action> actions(n_ * T_);
        for (;;) {
            double log_wg = 0.0, log_wb = 0.0;
            for (std::size_t j = 0; j < n_; ++j)
                for (std::size_t t = 0; t < T_; ++t) {
                    const SignalTable& tab = model_.table(j, t);
                    log_wg += std::log(tab.dist_g[mat.at(j, t)]);
                    log_wb += std::log(tab.dist_b[mat.at(j, t)]);
                }
            const double wg = std::exp(log_wg), wb = std::exp(log_wb);
            total_g += wg;
            total_b += wb;
            play(mat, T_, actions);
            for (std::size_t i = 0; i < n_; ++i)
                for (std::size_t t = 0; t < T_; ++t) {
                    if (actions[i * T_ + t] != Action::g) mg[i * T_ + t] += wg;
                    if (actions[i * T_ + t] != Action::b) mb[i * T_ + t] += wb;
                }
            if (!advance(mat, T_)) break;
        }
        if (std::abs(total_g - 1.0) > 1e-10 || std::abs(total_b - 1.0) > 1e-10)
            throw InvariantViolationError("exact enumeration weights do not sum to 1");
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t t = 0; t < T_; ++t)
                curve.set_exact(i, t, mg[i * T_ + t], mb[i * T_ + t]);
        return curve;
    }

private:
    void check_widths() const {
        for (std::size_t i = 0; i < n_; ++i) {
            long double pack = 1.0L;
            for (std::size_t t = 0; t < T_; ++t) pack *= static_cast<long double>(radix_[i * T_ + t]);
            if (pack > 9.2e18L)
                throw ResourceError("generic engine: signal prefix does not fit a 64-bit code");
            if (net_.neighbors(i).size() * (T_ - 1) > 63)
                throw ResourceError("generic engine: action history does not fit a 64-bit code");
        }
    }

    std::size_t max_radix() const {
        std::size_t r = 0;
        for (auto v : radix_) r = std::max(r, v);
        return r;
    }

    std::uint64_t predicted_steps() const {
        long double total = 0.0L;
        for (std::size_t t = 1; t <= T_; ++t) {
            long double mats = 1.0L;
            for (std::size_t j = 0; j < n_; ++j)
                for (std::size_t tau = 0; tau < t; ++tau)
                    mats *= static_cast<long double>(radix_[j * T_ + tau]);
            total += mats * static_cast<long double>(n_ * t);
            if (total > 1.8e19L) return ~std::uint64_t{0};
        }
        return static_cast<std::uint64_t>(total);
    }

    // Play periods 1..upto of `mat`, writing actions[agent * T_ + t].
    void play(const SignalMatrix& mat, std::size_t upto, std::vector<Action>& actions) const {
        std::vector<std::uint64_t> prefix(n_, 0), prefix_mult(n_, 1), hist(n_, 0);
        std::vector<std::size_t> hist_bits(n_, 0);
        for (std::size_t t = 1; t <= upto; ++t) {
            for (std::size_t i = 0; i < n_; ++i) {
                prefix[i] += prefix_mult[i] * mat.at(i, t - 1);
                prefix_mult[i] *= radix_[i * T_ + (t - 1)];
                actions[i * T_ + (t - 1)] = posterior_at(i, t, {prefix[i], hist[i]}).action;
            }
            for (std::size_t i = 0; i < n_; ++i) {
                const auto& nb = net_.neighbors(i);
                for (std::size_t k = 0; k < nb.size(); ++k)
                    if (actions[nb[k] * T_ + (t - 1)] == Action::g)
                        hist[i] |= std::uint64_t{1} << (hist_bits[i] + k);
                hist_bits[i] += nb.size();
            }
        }
    }

    bool advance(SignalMatrix& mat, std::size_t upto) const {
        for (std::size_t j = 0; j < n_; ++j)
            for (std::size_t t = 0; t < upto; ++t) {
                if (mat.at(j, t) + 1u < radix_[j * T_ + t]) {
                    ++mat.at(j, t);
                    return true;
                }
                mat.at(j, t) = 0;
            }
        return false;
    }

    void build(const ActionSource& action_source) {
        maps_.assign(T_, std::vector<std::unordered_map<InfoSetKey, PosteriorBucket, InfoSetKeyHash>>(n_));
        observers_.assign(T_, std::vector<std::unordered_map<std::uint64_t, ObserverBucket>>(n_));

        std::vector<Action> actions(n_ * T_);
        for (std::size_t t = 1; t <= T_; ++t) {
            SignalMatrix mat(n_, T_); // only the first t periods are enumerated
            for (;;) {
                steps_ += n_ * t;
                play(mat, t - 1, actions);

                // histories and weights as of period t
                double log_wg = 0.0, log_wb = 0.0;
                for (std::size_t j = 0; j < n_; ++j)
                    for (std::size_t tau = 0; tau < t; ++tau) {
                        const SignalTable& tab = model_.table(j, tau);
                        log_wg += std::log(tab.dist_g[mat.at(j, tau)]);
                        log_wb += std::log(tab.dist_b[mat.at(j, tau)]);
                    }
                for (std::size_t i = 0; i < n_; ++i) {
                    std::uint64_t hist = 0;
                    std::size_t bits = 0;
                    const auto& nb = net_.neighbors(i);
                    for (std::size_t tau = 0; tau + 1 < t; ++tau) {
                        for (std::size_t k = 0; k < nb.size(); ++k)
                            if (actions[nb[k] * T_ + tau] == Action::g)
                                hist |= std::uint64_t{1} << (bits + k);
                        bits += nb.size();
                    }
                    std::uint64_t prefix = 0, mult = 1;
                    for (std::size_t tau = 0; tau < t; ++tau) {
                        prefix += mult * mat.at(i, tau);
                        mult *= radix_[i * T_ + tau];
                    }
                    PosteriorBucket& bucket = maps_[t - 1][i][{prefix, hist}];
                    bucket.log_wg = log_sum_exp(bucket.log_wg, log_wg);
                    bucket.log_wb = log_sum_exp(bucket.log_wb, log_wb);
                    ObserverBucket& obs = observers_[t - 1][i][hist];
                    obs.log_vg = log_sum_exp(obs.log_vg, log_wg);
                    obs.log_vb = log_sum_exp(obs.log_vb, log_wb);
                }
                if (!advance(mat, t)) break;
            }
            for (std::size_t i = 0; i < n_; ++i)
                for (auto& [key, bucket] : maps_[t - 1][i])
                    bucket.action = action_source(i, t, key, bucket.llr());
        }
    }

    const SignalModel& model_;
    const Network& net_;
    std::size_t T_;
    std::size_t n_ = 0;
    TieRule tie_;
    std::vector<std::size_t> radix_; // alphabet size per (agent, period)
    std::uint64_t steps_ = 0;
    std::vector<std::vector<std::unordered_map<InfoSetKey, PosteriorBucket, InfoSetKeyHash>>> maps_;
    std::vector<std::vector<std::unordered_map<std::uint64_t, ObserverBucket>>> observers_;
};

} // namespace netlearn
