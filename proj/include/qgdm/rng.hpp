#pragma once

#include <cstdint>

namespace qgdm {

// splitmix64, used to expand a 64-bit seed into generator state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256** (Blackman & Vigna). Chosen over std::mt19937 because the
// output sequence is fully specified by the algorithm, so runs reproduce
// across standard libraries and platforms.
class Xoshiro256ss {
public:
    explicit Xoshiro256ss(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
    }

    // Derives an independent, named substream of a run seed. Stream ids are
    // fixed constants so every artifact is reproducible from (seed, stream).
    static Xoshiro256ss stream(std::uint64_t seed, std::uint64_t stream_id) {
        std::uint64_t mix = stream_id;
        return Xoshiro256ss(seed ^ splitmix64(mix));
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform in (0, 1]
    double uniform_open_closed() { return 1.0 - uniform(); }

    // uniform integer in [0, n), rejection-sampled so the draw is unbiased
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t r;
        do {
            r = next();
        } while (r >= limit);
        return r % n;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
};

// Named RNG streams. A run owns one seed; each consumer draws from its own
// substream so adding draws in one place never shifts another.
namespace streams {
inline constexpr std::uint64_t kTargetState = 0xA11CE;
inline constexpr std::uint64_t kParamInit = 0xB0B01;
inline constexpr std::uint64_t kBatchSampling = 0xC4701;
}  // namespace streams

}  // namespace qgdm
