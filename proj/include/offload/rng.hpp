#pragma once

#include <cstdint>
#include <string_view>

namespace offload {

/// Deterministic PRNG used everywhere in the library.
///
/// Core generator: SplitMix64 (Steele, Lea, Flood: "Fast splittable
/// pseudorandom number generators", the java.util.SplittableRandom mixer).
/// It is counter-based, has a 64-bit state, and is fully specified here,
/// so sequences reproduce bit-for-bit on any platform. No facility from
/// <random> is used: the standard only pins down engine output, not
/// distribution output.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53 random mantissa bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi). With lo == hi returns exactly lo.
    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    /// Uniform integer in [0, n) via 128-bit multiply-shift.
    int uniform_int(int n) {
        return static_cast<int>(
            (static_cast<unsigned __int128>(next_u64()) * static_cast<std::uint64_t>(n)) >> 64);
    }

    std::uint64_t state() const { return state_; }
    void set_state(std::uint64_t s) { state_ = s; }

private:
    std::uint64_t state_;
};

/// FNV-1a 64-bit hash, used to turn substream labels into seed material.
inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t fnv1a_bytes(const void* data, std::size_t len,
                                 std::uint64_t h = 1469598103934665603ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Splitting function: derives an independent substream from a master seed
/// and a textual label. Two distinct labels give unrelated streams; the
/// same (seed, label) pair always gives the same stream.
inline RandomStream derive_stream(std::uint64_t master_seed, std::string_view label) {
    return RandomStream(mix64(master_seed ^ fnv1a(label)));
}

}  // namespace offload
