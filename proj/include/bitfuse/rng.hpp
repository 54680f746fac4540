#pragma once

// Counter-based random number generation (Philox4x32-10, Salmon et al.,
// "Parallel random numbers: as easy as 1, 2, 3", SC 2011).
//
// Every random draw in the library is keyed by (seed, domain, trial, query,
// agent): the generator holds no global state, so results never depend on
// execution order, thread count, or how a sweep is chunked.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "bitfuse/common.hpp"

namespace bitfuse {

namespace detail {

constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<uint32_t, 4>& ctr, const std::array<uint32_t, 2>& key) {
    const uint64_t p0 = static_cast<uint64_t>(kPhiloxM0) * ctr[0];
    const uint64_t p1 = static_cast<uint64_t>(kPhiloxM1) * ctr[2];
    const uint32_t lo0 = static_cast<uint32_t>(p0);
    const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
    const uint32_t lo1 = static_cast<uint32_t>(p1);
    const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

// splitmix64 finalizer (Steele/Lea/Flood); used only to spread seed/domain
// bits into a Philox key, never as a generator by itself.
inline uint64_t mix64(uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace detail

// One keyed 128-bit block of Philox4x32 with 10 rounds.
inline std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 2> key,
                                          std::array<uint32_t, 4> ctr) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += detail::kPhiloxW0;
            key[1] += detail::kPhiloxW1;
        }
        detail::philox_round(ctr, key);
    }
    return ctr;
}

// Independent key spaces for the different kinds of draws an experiment
// makes. Training/query/agent streams deliberately do not encode the
// ensemble size n: a sweep with a shared base seed then reuses query pairs
// and nests training sets across n (common random numbers), which couples
// the estimates without changing any marginal law.
enum class StreamDomain : uint64_t {
    Training = 1,        // training-set draws, counter = (trial, example, 0, block)
    Query = 2,           // fresh query pairs, counter = (trial, query, 0, block)
    AgentCoin = 3,       // per-agent response coins, counter = (trial, query, agent, block)
    GuessSum = 4,        // aggregated guesser bits, counter = (trial, query, 0, block)
    MarginSample = 5,    // margin-statistics Monte Carlo
    Witness = 6,         // counterexample bit streams
    Generic = 7,         // tests and ad-hoc sampling
};

// A stream of draws addressed by (seed, domain, a, b, c). Each stream yields
// up to 2^32 blocks of 128 bits; the block index is the fourth counter word.
class RngStream {
public:
    RngStream(uint64_t seed, StreamDomain domain, uint32_t a = 0, uint32_t b = 0,
              uint32_t c = 0)
        : ctr_{a, b, c, 0} {
        const uint64_t k = detail::mix64(seed ^ detail::mix64(static_cast<uint64_t>(domain)));
        key_ = {static_cast<uint32_t>(k), static_cast<uint32_t>(k >> 32)};
    }

    uint32_t next_u32() {
        if (have_ == 0) refill();
        return buf_[--have_];
    }

    uint64_t next_u64() {
        const uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    /// Uniform double in [0, 1), 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in (0, 1]; safe as a log() argument.
    double next_open_double() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return next_double() < p; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Standard normal via Box-Muller (two uniforms per call, one value kept,
    /// so the draw count per call is fixed).
    double gaussian() {
        const double u1 = next_open_double();
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Exact Binomial(m, 1/2) as a popcount of m random bits.
    uint64_t binomial_half(uint64_t m) {
        uint64_t ones = 0;
        while (m >= 64) {
            ones += std::popcount(next_u64());
            m -= 64;
        }
        if (m > 0) {
            const uint64_t word = next_u64() & ((m == 64) ? ~0ull : ((1ull << m) - 1ull));
            ones += std::popcount(word);
        }
        return ones;
    }

    /// Index into a discrete law given by `masses` (must sum to 1).
    template <typename Container>
    std::size_t categorical(const Container& masses) {
        const double u = next_double();
        double acc = 0.0;
        std::size_t last = 0;
        for (std::size_t i = 0; i < masses.size(); ++i) {
            acc += masses[i];
            last = i;
            if (u < acc) return i;
        }
        return last;  // u landed in the rounding slack at the top
    }

private:
    void refill() {
        std::array<uint32_t, 4> ctr = ctr_;
        ctr[3] = block_++;
        buf_ = philox4x32(key_, ctr);
        have_ = 4;
    }

    std::array<uint32_t, 2> key_{};
    std::array<uint32_t, 4> ctr_{};
    std::array<uint32_t, 4> buf_{};
    uint32_t block_ = 0;
    int have_ = 0;
};

}  // namespace bitfuse
