// Shared primitives: binary state/action types, tie-breaking rule,
// log-space helpers and the error taxonomy used across the library.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace netlearn {

// World state and actions share the same two labels {b, g}.
enum class State : std::uint8_t { b = 0, g = 1 };
enum class Action : std::uint8_t { b = 0, g = 1 };

inline const char* to_string(State s) { return s == State::g ? "g" : "b"; }
inline const char* to_string(Action a) { return a == Action::g ? "g" : "b"; }

inline Action matching_action(State s) {
    return s == State::g ? Action::g : Action::b;
}
inline bool matches(Action a, State s) { return a == matching_action(s); }

// Indifference rule at posterior exactly 1/2. Common knowledge among agents;
// kept as a parameter so tests can swap it and confirm insensitivity.
struct TieRule {
    Action at_indifference = Action::g;
};

// Posterior log-odds below this magnitude are treated as an exact tie.
inline constexpr double kTieEps = 1e-12;
// Tolerance for log-likelihood comparisons between independent computation routes.
inline constexpr double kLlrTol = 1e-9;
// Tolerance for probability normalization of configured distributions.
inline constexpr double kProbTol = 1e-12;

// Action from a posterior log-odds value L: g when L > 0, b when L < 0,
// tie rule at |L| <= kTieEps.
inline Action action_from_llr(double L, TieRule tie = {}) {
    if (L > kTieEps) return Action::g;
    if (L < -kTieEps) return Action::b;
    return tie.at_indifference;
}

inline double sigmoid(double L) {
    // p = e^L / (1 + e^L), evaluated stably on both tails
    if (L >= 0.0) return 1.0 / (1.0 + std::exp(-L));
    const double e = std::exp(L);
    return e / (1.0 + e);
}

inline double log_sum_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = a > b ? a : b;
    return m + std::log1p(std::exp((a > b ? b : a) - m));
}

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Error taxonomy, mapped onto CLI exit codes (2, 3, 4).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};
struct ResourceError : std::runtime_error {
    explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};
struct InvariantViolationError : std::runtime_error {
    explicit InvariantViolationError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace netlearn
