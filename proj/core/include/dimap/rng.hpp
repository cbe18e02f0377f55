#pragma once

#include <cmath>
#include <cstdint>

namespace dimap {

// Counter-based stream built on splitmix64. Every draw is a pure function of
// (seed, stream id, counter), so results do not depend on the order in which
// streams are created or interleaved within an epoch.
class RngStream {
public:
    RngStream() = default;
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
        : key_(mix(mix(0x9e3779b97f4a7c15ULL ^ master_seed) ^ stream_id)) {}

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

    // uniform in (0,1); never returns 0, safe under log()
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Box-Muller; one value per two uniforms keeps the stream stateless
    double gaussian() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    double gaussian(double mean, double sigma) { return mean + sigma * gaussian(); }

    // uniform integer in [0, bound)
    std::uint64_t uniform_int(std::uint64_t bound) { return next_u64() % bound; }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

// Stable stream ids: one stream per (node, purpose) pair.
enum class RngPurpose : std::uint64_t {
    GnssClaim = 1,
    Echo = 2,
    Detection = 3,
    RotorConfusion = 4,
    AttackClaims = 5,
    Generic = 6,
};

inline RngStream node_stream(std::uint64_t seed, std::int64_t node_id, RngPurpose purpose) {
    return RngStream(seed, (static_cast<std::uint64_t>(node_id) << 8) |
                               static_cast<std::uint64_t>(purpose));
}

}  // namespace dimap
