#pragma once

#include <cstdint>

namespace pttk {

/// Mixes a 64-bit value into the next state of the splitmix64 sequence.
/// Used for seed derivation so that sub-streams of one user seed are
/// decorrelated and reproducible across platforms.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// xoshiro256** generator. Hand-rolled so that streams are bit-reproducible
/// independent of the standard library implementation; all randomness in the
/// library flows from a single user-suppliable 64-bit seed through this type.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1), 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). Multiply-shift bound; bias is negligible for
    /// the index ranges used here (n << 2^64).
    std::int64_t uniform_int(std::int64_t n) {
        return static_cast<std::int64_t>(
            (static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(n)) >> 64);
    }

    bool coin() { return (next_u64() & 1ull) != 0; }

    /// Derives an independent sub-stream (e.g. one per experiment phase).
    Rng fork(std::uint64_t stream) const {
        std::uint64_t sm = state_[0] ^ (0x9e3779b97f4a7c15ull * (stream + 1));
        return Rng(splitmix64(sm));
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
};

} // namespace pttk
