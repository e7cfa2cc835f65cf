#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace forge {

// splitmix64 step; the single primitive behind every random draw in the
// toolkit, so runs are reproducible bit-for-bit across platforms.
inline uint64_t splitmix64(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t hash_string(std::string_view s) {
    // FNV-1a
    uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : s) {
        h ^= static_cast<uint8_t>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Sub-seed derivation for pipeline stages: (global seed, scene id, stage name)
// always maps to the same stream.
inline uint64_t derive_seed(uint64_t globalSeed, std::string_view sceneId,
                            std::string_view stageName) {
    uint64_t state = globalSeed;
    splitmix64(state);
    state ^= hash_string(sceneId);
    splitmix64(state);
    state ^= hash_string(stageName);
    return splitmix64(state);
}

// Deterministic generator. Distributions are hand-pinned (not the
// implementation-defined std ones) so outputs do not depend on the stdlib.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() { return splitmix64(state_); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    uint64_t below(uint64_t n) {
        const uint64_t threshold = (0 - n) % n;
        for (;;) {
            const uint64_t r = next_u64();
            if (r >= threshold)
                return r % n;
        }
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal via Box-Muller, one spare cached.
    double normal() {
        if (hasSpare_) {
            hasSpare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 <= 0.0)
            u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        hasSpare_ = true;
        return r * std::cos(theta);
    }

private:
    uint64_t state_;
    double spare_ = 0.0;
    bool hasSpare_ = false;
};

} // namespace forge
