#pragma once

#include <cstdint>

namespace egyptfrac {

/// Counter-based generator: every draw is a pure function of
/// (seed, stream, counter), so draws can be produced in any order.
///
/// key   = splitmix64(seed ^ splitmix64(stream + golden))
/// draw  = splitmix64(key + counter * golden)
/// with golden = 0x9E3779B97F4A7C15 and splitmix64 the finalizer of
/// Steele, Lea and Flood's SplitMix64.
class CounterRng {
public:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

    static constexpr std::uint64_t splitmix64(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    constexpr CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(splitmix64(seed ^ splitmix64(stream + kGolden))) {}

    constexpr std::uint64_t bits(std::uint64_t counter) const { return splitmix64(key_ + counter * kGolden); }

    /// Uniform in [0, 1) with 53 random bits.
    constexpr double uniform(std::uint64_t counter) const {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t key_;
};

}  // namespace egyptfrac
