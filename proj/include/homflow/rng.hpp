#pragma once

// xoshiro256++ with SplitMix64 stream derivation.  Every Monte Carlo sample
// point gets its own stream (stream id = point index), so results are
// bit-identical no matter how points are scheduled across workers.

#include <cstdint>

namespace homflow {

class Xoshiro256pp {
  public:
    explicit Xoshiro256pp(std::uint64_t seed = 0, std::uint64_t stream = 0) {
        // SplitMix64 over a seed/stream mix fills the state; the all-zero
        // state (the one forbidden state) is nudged if it ever shows up.
        std::uint64_t x = seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
        for (auto& w : s_) w = splitmix64(x);
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x9E3779B97F4A7C15ULL;
    }

    std::uint64_t next() {
        const std::uint64_t out = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return out;
    }

    // Uniform double in [0, 1), 53 significant bits.
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

  private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
    std::uint64_t s_[4];
};

}  // namespace homflow
