// Deterministic random number generation.
//
// Seed splitting: a single experiment seed deterministically derives
// per-trial and per-agent substreams, so results are reproducible and
// independent of how trials are distributed over worker threads.
//
//   trial_seed(seed, k)      = mix(seed, 0x74726961 ^ k)   ("tria")
//   state_stream(trial_seed) = stream(mix(trial_seed, 0))
//   agent_stream(trial_seed, i) = stream(mix(trial_seed, i + 1))
//
// where mix is one splitmix64 step of (a + GOLDEN*b) and stream is
// xoshiro256++ seeded by four splitmix64 outputs. The generators are
// self-contained so sequences are identical across platforms (the
// standard library distributions are implementation-defined).
#pragma once

#include <array>
#include <cstdint>

namespace netlearn {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t s = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
    return splitmix64(s);
}

class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed = 0) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform double in [0, 1), 53 random bits.
    double uniform01() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::array<std::uint64_t, 4> s_{};
};

inline std::uint64_t trial_seed(std::uint64_t experiment_seed, std::uint64_t trial_index) {
    return mix_seed(experiment_seed, 0x74726961ULL ^ trial_index);
}

inline Xoshiro256pp state_stream(std::uint64_t trial_seed_value) {
    return Xoshiro256pp(mix_seed(trial_seed_value, 0));
}

inline Xoshiro256pp agent_stream(std::uint64_t trial_seed_value, std::uint64_t agent_index) {
    return Xoshiro256pp(mix_seed(trial_seed_value, agent_index + 1));
}

} // namespace netlearn
