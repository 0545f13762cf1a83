// Conditional signal distributions: validation, sampling, per-signal
// log-likelihood ratios and the bound M = 2 sup |log mu_g/mu_b|.
//
// A model is either stationary (one table shared by every agent and period)
// or a full per-(agent, period) grid. All belief arithmetic downstream works
// on log-likelihood ratios; probabilities only appear when sampling and when
// validating configured tables.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "netlearn/common.hpp"
#include "netlearn/rng.hpp"

namespace netlearn {

struct SignalTable {
    std::vector<std::string> alphabet;
    std::vector<double> dist_g;
    std::vector<double> dist_b;
    std::vector<double> llr; // log(dist_g[k] / dist_b[k])

    std::size_t size() const { return alphabet.size(); }
};

namespace detail {

inline void validate_and_finish(SignalTable& t) {
    const std::size_t k = t.alphabet.size();
    if (k == 0) throw ConfigError("signal table: empty alphabet");
    if (t.dist_g.size() != k || t.dist_b.size() != k)
        throw ConfigError("signal table: distribution length does not match alphabet");
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b)
            if (t.alphabet[a] == t.alphabet[b])
                throw ConfigError("signal table: duplicate symbol '" + t.alphabet[a] + "'");
    for (const double* d : {t.dist_g.data(), t.dist_b.data()}) {
        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            if (d[i] < 0.0) throw ConfigError("signal table: negative probability");
            sum += d[i];
        }
        if (std::abs(sum - 1.0) > kProbTol)
            throw ConfigError("signal table: probabilities sum to " + std::to_string(sum) +
                              ", outside tolerance");
    }
    // Renormalize residual rounding error (inputs already within kProbTol).
    for (auto* d : {&t.dist_g, &t.dist_b}) {
        double sum = 0.0;
        for (double v : *d) sum += v;
        for (double& v : *d) v /= sum;
    }
    t.llr.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        const bool zg = t.dist_g[i] == 0.0, zb = t.dist_b[i] == 0.0;
        if (zg != zb)
            throw ConfigError("signal table: symbol '" + t.alphabet[i] +
                              "' reveals the state (zero probability under one state only)");
        if (zg && zb)
            throw ConfigError("signal table: symbol '" + t.alphabet[i] +
                              "' has zero probability under both states");
        t.llr[i] = std::log(t.dist_g[i]) - std::log(t.dist_b[i]);
    }
}

} // namespace detail

class SignalModel {
public:
    // Stationary model: one table for every agent and period.
    static SignalModel stationary(SignalTable table) {
        detail::validate_and_finish(table);
        SignalModel m;
        m.stationary_ = true;
        m.tables_.push_back(std::move(table));
        return m;
    }

    // Heterogeneous model: tables[i][t] for agent i, period t (0-based).
    static SignalModel grid(std::vector<std::vector<SignalTable>> tables) {
        if (tables.empty() || tables.front().empty())
            throw ConfigError("signal grid: empty");
        const std::size_t horizon = tables.front().size();
        SignalModel m;
        m.stationary_ = false;
        m.grid_agents_ = tables.size();
        m.grid_horizon_ = horizon;
        for (auto& row : tables) {
            if (row.size() != horizon)
                throw ConfigError("signal grid: ragged horizon");
            for (auto& t : row) {
                detail::validate_and_finish(t);
                m.tables_.push_back(std::move(t));
            }
        }
        return m;
    }

    bool is_stationary() const { return stationary_; }

    const SignalTable& table(std::size_t agent, std::size_t period) const {
        if (stationary_) return tables_.front();
        if (agent >= grid_agents_ || period >= grid_horizon_)
            throw ConfigError("signal grid: (agent, period) out of range");
        return tables_[agent * grid_horizon_ + period];
    }

    // Log-likelihood ratio of one signal, in nats.
    double llr(std::size_t agent, std::size_t period, std::size_t symbol) const {
        const SignalTable& t = table(agent, period);
        if (symbol >= t.size()) throw ConfigError("llr: unknown symbol index");
        return t.llr[symbol];
    }
    double llr(std::size_t agent, std::size_t period, const std::string& symbol) const {
        return llr(agent, period, symbol_index(agent, period, symbol));
    }

    std::size_t symbol_index(std::size_t agent, std::size_t period,
                             const std::string& symbol) const {
        const SignalTable& t = table(agent, period);
        auto it = std::find(t.alphabet.begin(), t.alphabet.end(), symbol);
        if (it == t.alphabet.end())
            throw ConfigError("unknown signal symbol '" + symbol + "'");
        return static_cast<std::size_t>(it - t.alphabet.begin());
    }

    // M = 2 * sup over (agent, period, symbol) of |llr|.
    double bound_M() const {
        double m = 0.0;
        for (const auto& t : tables_)
            for (double v : t.llr) m = std::max(m, std::abs(v));
        return 2.0 * m;
    }

    bool is_binary() const {
        for (const auto& t : tables_)
            if (t.size() != 2) return false;
        return true;
    }
    bool is_stationary_binary() const { return stationary_ && tables_.front().size() == 2; }

    // Stationary symmetric binary check: mu_g = (p, 1-p), mu_b = (1-p, p).
    bool is_symmetric_binary() const {
        if (!is_stationary_binary()) return false;
        const SignalTable& t = tables_.front();
        return std::abs(t.dist_g[0] - t.dist_b[1]) <= kProbTol &&
               std::abs(t.dist_g[1] - t.dist_b[0]) <= kProbTol;
    }

    // Swap the two conditional distributions (state relabeling g <-> b).
    SignalModel swapped_states() const {
        SignalModel m = *this;
        for (auto& t : m.tables_) {
            std::swap(t.dist_g, t.dist_b);
            for (double& v : t.llr) v = -v;
        }
        return m;
    }

private:
    bool stationary_ = true;
    std::size_t grid_agents_ = 0;
    std::size_t grid_horizon_ = 0;
    std::vector<SignalTable> tables_;
};

// Binary signal equal to the state with probability p. Alphabet {g, b},
// symbol index 0 = "g".
inline SignalModel make_symmetric_binary(double p) {
    if (!(p >= 0.5 && p < 1.0))
        throw ConfigError("symmetric binary signal requires 0.5 <= p < 1, got " +
                          std::to_string(p));
    SignalTable t;
    t.alphabet = {"g", "b"};
    t.dist_g = {p, 1.0 - p};
    t.dist_b = {1.0 - p, p};
    return SignalModel::stationary(std::move(t));
}

// Realized signals for one run: n agents by T periods of symbol indices.
struct SignalMatrix {
    std::size_t n = 0;
    std::size_t horizon = 0;
    std::vector<std::uint8_t> data; // row-major, agent-major

    SignalMatrix() = default;
    SignalMatrix(std::size_t n_, std::size_t T_) : n(n_), horizon(T_), data(n_ * T_, 0) {}

    std::uint8_t at(std::size_t agent, std::size_t period) const {
        return data[agent * horizon + period];
    }
    std::uint8_t& at(std::size_t agent, std::size_t period) {
        return data[agent * horizon + period];
    }
    bool operator==(const SignalMatrix&) const = default;
};

// Draw an n-by-T signal matrix under the given state. Each agent's row comes
// from its own substream of `seed` (see rng.hpp), so the draw for agent i is
// unchanged by the presence of other agents.
inline void sample_signals_into(const SignalModel& model, State theta, std::size_t n,
                                std::size_t T, std::uint64_t seed, SignalMatrix& out) {
    if (n < 1 || T < 1) throw ConfigError("sample_signals: need n >= 1 and T >= 1");
    out.n = n;
    out.horizon = T;
    out.data.assign(n * T, 0);
    for (std::size_t i = 0; i < n; ++i) {
        Xoshiro256pp rng = agent_stream(seed, i);
        for (std::size_t t = 0; t < T; ++t) {
            const SignalTable& tab = model.table(i, t);
            const std::vector<double>& d = theta == State::g ? tab.dist_g : tab.dist_b;
            const double u = rng.uniform01();
            double acc = 0.0;
            std::uint8_t sym = static_cast<std::uint8_t>(d.size() - 1);
            for (std::size_t k = 0; k < d.size(); ++k) {
                acc += d[k];
                if (u < acc) { sym = static_cast<std::uint8_t>(k); break; }
            }
            out.at(i, t) = sym;
        }
    }
}

inline SignalMatrix sample_signals(const SignalModel& model, State theta, std::size_t n,
                                   std::size_t T, std::uint64_t seed) {
    SignalMatrix out;
    sample_signals_into(model, theta, n, T, seed, out);
    return out;
}

} // namespace netlearn
