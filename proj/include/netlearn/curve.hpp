// Mistake curves: per-agent, per-period probabilities of mismatching the
// state, either estimated from Monte Carlo trials or computed exactly.
// Unconditional values average the two states under the uniform prior;
// conditional-on-state values are kept as well.
//
// Monte Carlo counts are additionally kept per trial block (trial index mod
// block count), which lets the rate estimator bootstrap over independent
// blocks without storing per-trial data.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "netlearn/common.hpp"

namespace netlearn {

enum class CurveMode { monte_carlo, exact_forward, analytic };
enum class Conditioning { unconditional, given_g, given_b };

inline const char* to_string(CurveMode m) {
    switch (m) {
        case CurveMode::monte_carlo: return "monte_carlo";
        case CurveMode::exact_forward: return "exact_forward";
        case CurveMode::analytic: return "analytic";
    }
    return "?";
}

inline const char* to_string(Conditioning c) {
    switch (c) {
        case Conditioning::unconditional: return "unconditional";
        case Conditioning::given_g: return "g";
        case Conditioning::given_b: return "b";
    }
    return "?";
}

struct BlockCounts {
    std::uint64_t trials_g = 0;
    std::uint64_t trials_b = 0;
    std::vector<std::uint64_t> mistakes_g; // [agent * horizon + t]
    std::vector<std::uint64_t> mistakes_b;

    bool operator==(const BlockCounts&) const = default;
};

class MistakeCurve {
public:
    MistakeCurve() = default;
    MistakeCurve(CurveMode mode, std::size_t n, std::size_t horizon)
        : mode_(mode), n_(n), horizon_(horizon) {
        const std::size_t cells = n * horizon;
        if (mode == CurveMode::monte_carlo) {
            mistakes_g_.assign(cells, 0);
            mistakes_b_.assign(cells, 0);
        } else {
            p_exact_g_.assign(cells, 0.0);
            p_exact_b_.assign(cells, 0.0);
        }
    }

    CurveMode mode() const { return mode_; }
    bool exact() const { return mode_ != CurveMode::monte_carlo; }
    std::size_t agents() const { return n_; }
    std::size_t horizon() const { return horizon_; }

    // --- exact / analytic mode ---
    void set_exact(std::size_t agent, std::size_t t, double pg, double pb) {
        p_exact_g_[idx(agent, t)] = pg;
        p_exact_b_[idx(agent, t)] = pb;
    }
    double p_exact(Conditioning c, std::size_t agent, std::size_t t) const {
        switch (c) {
            case Conditioning::given_g: return p_exact_g_[idx(agent, t)];
            case Conditioning::given_b: return p_exact_b_[idx(agent, t)];
            default: return 0.5 * (p_exact_g_[idx(agent, t)] + p_exact_b_[idx(agent, t)]);
        }
    }

    // --- Monte Carlo mode ---
    void merge_block(std::size_t block_index, const BlockCounts& bc) {
        (void)block_index;
        trials_g_ += bc.trials_g;
        trials_b_ += bc.trials_b;
        for (std::size_t k = 0; k < mistakes_g_.size(); ++k) {
            mistakes_g_[k] += bc.mistakes_g[k];
            mistakes_b_[k] += bc.mistakes_b[k];
        }
        blocks_.push_back(bc);
    }
    const std::vector<BlockCounts>& blocks() const { return blocks_; }

    std::uint64_t trials(Conditioning c) const {
        switch (c) {
            case Conditioning::given_g: return trials_g_;
            case Conditioning::given_b: return trials_b_;
            default: return trials_g_ + trials_b_;
        }
    }
    std::uint64_t mistakes(Conditioning c, std::size_t agent, std::size_t t) const {
        switch (c) {
            case Conditioning::given_g: return mistakes_g_[idx(agent, t)];
            case Conditioning::given_b: return mistakes_b_[idx(agent, t)];
            default: return mistakes_g_[idx(agent, t)] + mistakes_b_[idx(agent, t)];
        }
    }

    // count accessors that are well-defined (zero) in exact modes
    std::uint64_t mistakes_or_zero(Conditioning c, std::size_t agent, std::size_t t) const {
        return exact() ? 0 : mistakes(c, agent, t);
    }
    std::uint64_t trials_or_zero(Conditioning c) const { return exact() ? 0 : trials(c); }

    // Point estimate (MC) or exact value (exact/analytic modes).
    double p_hat(Conditioning c, std::size_t agent, std::size_t t) const {
        if (exact()) return p_exact(c, agent, t);
        const std::uint64_t tr = trials(c);
        if (tr == 0) return 0.0;
        return static_cast<double>(mistakes(c, agent, t)) / static_cast<double>(tr);
    }

    double se(Conditioning c, std::size_t agent, std::size_t t) const {
        if (exact()) return 0.0;
        const std::uint64_t tr = trials(c);
        if (tr == 0) return 0.0;
        const double p = p_hat(c, agent, t);
        return std::sqrt(p * (1.0 - p) / static_cast<double>(tr));
    }

    bool operator==(const MistakeCurve&) const = default;

private:
    std::size_t idx(std::size_t agent, std::size_t t) const { return agent * horizon_ + t; }

    CurveMode mode_ = CurveMode::monte_carlo;
    std::size_t n_ = 0;
    std::size_t horizon_ = 0;
    std::uint64_t trials_g_ = 0;
    std::uint64_t trials_b_ = 0;
    std::vector<std::uint64_t> mistakes_g_;
    std::vector<std::uint64_t> mistakes_b_;
    std::vector<double> p_exact_g_;
    std::vector<double> p_exact_b_;
    std::vector<BlockCounts> blocks_;
};

} // namespace netlearn
