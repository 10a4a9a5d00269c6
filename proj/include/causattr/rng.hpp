#pragma once

#include <cstdint>
#include <limits>

namespace causattr {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Counter-based generator keyed by (seed, stream). Distinct streams are
// independent, so draws can be partitioned by stratum, start or replicate
// without depending on execution order. Models UniformRandomBitGenerator.
class StreamRng {
public:
    using result_type = std::uint64_t;

    StreamRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix64(mix64(seed) ^ (stream * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL))) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix64(key_ + 0x9E3779B97F4A7C15ULL * ++counter_); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    // Child stream for nested partitioning.
    StreamRng substream(std::uint64_t stream) const { return StreamRng(key_, stream); }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace causattr
