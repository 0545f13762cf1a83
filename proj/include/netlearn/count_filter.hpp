// Per-agent filter over the sufficient statistic of a stationary binary
// signal stream: the count of index-0 symbols. Cell c holds the joint
// probability, under each state, that the agent's first t signals contain c
// such symbols AND that the actions this implies match the actions actually
// observed so far.
//
// Masses are kept in linear space with a per-state log scale factor that is
// renormalized whenever the masses get small, so arbitrarily long horizons
// cannot underflow; all quantities read out of the filter are log ratios.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "netlearn/common.hpp"

namespace netlearn {

class CountFilter {
public:
    explicit CountFilter(std::size_t reserve_horizon = 0) : mass_g_{1.0}, mass_b_{1.0} {
        mass_g_.reserve(reserve_horizon + 1);
        mass_b_.reserve(reserve_horizon + 1);
    }

    std::size_t periods() const { return mass_g_.size() - 1; }

    // Back to the empty-stream state, keeping allocated capacity.
    void reset() {
        mass_g_.assign(1, 1.0);
        mass_b_.assign(1, 1.0);
        scale_g_ = scale_b_ = 0.0;
    }

    // Absorb one more signal draw: P[symbol 0 | g] = qg, P[symbol 0 | b] = qb.
    // In-place downward sweep; cell c after the sweep combines the old cells
    // c-1 (symbol 0 drawn) and c (other symbol drawn).
    void extend(double qg, double qb) {
        const std::size_t t = mass_g_.size();
        mass_g_.push_back(0.0);
        mass_b_.push_back(0.0);
        for (std::size_t c = t; c > 0; --c) {
            mass_g_[c] = mass_g_[c - 1] * qg + mass_g_[c] * (1.0 - qg);
            mass_b_[c] = mass_b_[c - 1] * qb + mass_b_[c] * (1.0 - qb);
        }
        mass_g_[0] *= 1.0 - qg;
        mass_b_[0] *= 1.0 - qb;
        maybe_rescale();
    }

    // log( P[observed actions so far | g] / P[... | b] ): the agent's
    // contribution to any observer who has seen its actions.
    double log_mass_ratio() const {
        double zg = 0.0, zb = 0.0;
        for (double v : mass_g_) zg += v;
        for (double v : mass_b_) zb += v;
        return (std::log(zg) + scale_g_) - (std::log(zb) + scale_b_);
    }

    // Zero out every count whose implied action differs from the observed
    // one. `action_at(c)` must be the action the agent would take at period
    // t with count c, under the decision rule all observers agree on.
    template <typename ActionAt>
    void filter(const ActionAt& action_at, Action observed) {
        for (std::size_t c = 0; c < mass_g_.size(); ++c) {
            if (action_at(c) != observed) {
                mass_g_[c] = 0.0;
                mass_b_[c] = 0.0;
            }
        }
    }

    double mass_g(std::size_t c) const { return mass_g_[c]; }
    double mass_b(std::size_t c) const { return mass_b_[c]; }

private:
    void maybe_rescale() {
        double m = 0.0;
        for (double v : mass_g_) m = std::max(m, v);
        if (m > 0.0 && m < 1e-150) {
            for (double& v : mass_g_) v /= m;
            scale_g_ += std::log(m);
        }
        m = 0.0;
        for (double v : mass_b_) m = std::max(m, v);
        if (m > 0.0 && m < 1e-150) {
            for (double& v : mass_b_) v /= m;
            scale_b_ += std::log(m);
        }
    }

    std::vector<double> mass_g_, mass_b_;
    double scale_g_ = 0.0, scale_b_ = 0.0;
};

} // namespace netlearn
