#pragma once

#include <cstdint>

namespace funcito {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Counter-based generator: every variate is a pure function of
/// (seed, stream, counter). Parallel trajectories draw without shared state,
/// and any single draw is reproducible in isolation, which makes ensemble
/// output independent of the worker count.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(splitmix64(splitmix64(seed) ^
                          splitmix64(0x9E3779B97F4A7C15ULL * (stream + 0x7F4A7C15ULL)))) {}

    std::uint64_t raw(std::uint64_t counter) const {
        return splitmix64(key_ ^ splitmix64(counter * 0xD1342543DE82EF95ULL + 0x2545F4914F6CDD1DULL));
    }

    /// Uniform in (0,1), never exactly 0 or 1.
    double uniform(std::uint64_t counter) const {
        return (static_cast<double>(raw(counter) >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (cosine branch).
    double normal(std::uint64_t counter) const;

private:
    std::uint64_t key_;
};

}  // namespace funcito
