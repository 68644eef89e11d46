#pragma once

#include <cstdint>

namespace polysense::rng {

/// SplitMix64 finalizer. Used both as a mixing function for counter-based
/// streams and as the step of the sequential generator below.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline double to_unit(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;  // [0, 1)
}

/// Stateless counter-based stream: draw k of the tuple identified by
/// (seed, stream, index) is a pure function of its arguments, so parallel
/// evaluation order cannot change any value.
inline double counter_uniform(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t index, std::uint64_t k) {
    std::uint64_t h = mix64(seed ^ 0xA5A5A5A5A5A5A5A5ULL);
    h = mix64(h ^ (stream * 0xD1342543DE82EF95ULL));
    h = mix64(h ^ (index * 0x2545F4914F6CDD1DULL));
    return to_unit(mix64(h ^ (k * 0x9E3779B97F4A7C15ULL)));
}

/// Small sequential generator for code that wants an explicit stream object
/// (polygon generation). Platform-independent, unlike <random> distributions.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : state_(mix64(seed ^ 0x853C49E6748FEA9BULL)) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double uniform() { return to_unit(next_u64()); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t state_;
};

}  // namespace polysense::rng
