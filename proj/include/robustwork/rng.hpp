#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace robustwork {

/// Named sub-streams. Each consumer draws from its own stream so that
/// changing one policy leaves every other consumer's draws untouched.
enum class StreamId : std::uint64_t {
    Arrivals = 1,
    ScanCoin = 2,
    ProcessCoin = 3,
    Routing = 4,
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed of sub-stream (stream, index) under a master seed. Index separates
/// per-server streams in decentralized mode.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, StreamId stream, std::uint64_t index = 0) {
    return splitmix64(splitmix64(master) ^ splitmix64(static_cast<std::uint64_t>(stream) * 0x100000001B3ULL + index));
}

/// Platform-independent random stream: std::mt19937_64 (whose output is fixed
/// by the standard) plus hand-written conversions, since the standard
/// distributions are implementation-defined.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed = 0) : engine_(seed) {}
    RandomStream(std::uint64_t master, StreamId stream, std::uint64_t index = 0)
        : engine_(derive_seed(master, stream, index)) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Uniform integer in [lo, hi], unbiased by rejection.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
        if (range == 0)
            return static_cast<std::int64_t>(engine_());
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return lo + static_cast<std::int64_t>(x % range);
    }

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

} // namespace robustwork
