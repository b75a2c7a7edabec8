#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace seqkern {

/// SplitMix64 step; also the 64-bit finalizer used to key streams.
/// The finalizer is bijective, which is what makes stream derivation
/// collision-free (see Xoshiro256PlusPlus(master, a, b)).
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t x) { return splitmix64(x); }

/// xoshiro256++ (Blackman/Vigna). Small state, fast, and entirely
/// self-contained so output is identical on every platform.
class Xoshiro256PlusPlus {
  public:
    using result_type = std::uint64_t;

    explicit Xoshiro256PlusPlus(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
        guard_nonzero();
    }

    /// Stream keyed by (master, a, b).  Distinct keys give distinct states:
    /// words 0 and 1 carry bijective images of a and b, so for a fixed
    /// master the map (a, b) -> state is injective.
    Xoshiro256PlusPlus(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
        std::uint64_t sm = master;
        for (auto& w : s_) w = splitmix64(sm);
        s_[0] ^= mix64(a ^ 0x6a09e667f3bcc908ULL);
        s_[1] ^= mix64(b ^ 0xbb67ae8584caa73bULL);
        guard_nonzero();
    }

    result_type operator()() {
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

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<std::uint64_t>::max(); }

    /// Uniform double in [0, 1), 53 random bits.
    double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1]; safe as a log() argument.
    double uniform01_open() {
        return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    void guard_nonzero() {
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[3] = 0x9e3779b97f4a7c15ULL;
    }
    std::array<std::uint64_t, 4> s_{};
};

}  // namespace seqkern
