#pragma once

#include <array>
#include <bit>
#include <cstdint>

namespace paco {

// splitmix64, used for seeding and stream derivation
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

// xoshiro256++ stream. Cheap enough for one draw per candidate edge.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& w : s_) w = sm.next();
    }

    // Derives an independent stream from a master seed and a stream index.
    // Ant behaviour depends only on (master, stream), not on worker layout.
    static Rng for_stream(std::uint64_t master, std::uint64_t stream) {
        SplitMix64 sm(master);
        std::uint64_t a = sm.next();
        SplitMix64 mix(a ^ (stream * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL));
        return Rng(mix.next());
    }

    std::uint64_t next_u64() {
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

    // Uniform in [0, 1), 53-bit resolution. Consumes exactly one u64.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Unbiased integer in [0, bound) by rejection on a power-of-two mask.
    // bound must be > 0; bound == 1 consumes exactly one draw.
    std::uint32_t uniform_below(std::uint32_t bound) {
        const std::uint32_t mask =
            bound <= 1 ? 0 : (~std::uint32_t{0} >> std::countl_zero(bound - 1));
        for (;;) {
            const auto r = static_cast<std::uint32_t>(next_u64()) & mask;
            if (r < bound) return r;
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> s_;
};

} // namespace paco
