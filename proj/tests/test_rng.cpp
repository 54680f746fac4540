#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <vector>

#include "bitfuse/rng.hpp"

using namespace bitfuse;

TEST_CASE("philox4x32-10 known-answer vectors") {
    // Pinned against an independent implementation of the algorithm.
    auto out = philox4x32({0u, 0u}, {0u, 0u, 0u, 0u});
    CHECK(out == std::array<uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});

    out = philox4x32({0xffffffffu, 0xffffffffu},
                     {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu});
    CHECK(out == std::array<uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});

    out = philox4x32({0xa4093822u, 0x299f31d0u},
                     {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u});
    CHECK(out == std::array<uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are reproducible and keyed") {
    RngStream a(42, StreamDomain::AgentCoin, 1, 2, 3);
    RngStream b(42, StreamDomain::AgentCoin, 1, 2, 3);
    for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());

    // changing any component of the key changes the stream
    RngStream base(42, StreamDomain::AgentCoin, 1, 2, 3);
    RngStream seed_(43, StreamDomain::AgentCoin, 1, 2, 3);
    RngStream dom(42, StreamDomain::Query, 1, 2, 3);
    RngStream ctr(42, StreamDomain::AgentCoin, 1, 2, 4);
    const uint64_t v = base.next_u64();
    CHECK(v != seed_.next_u64());
    CHECK(v != dom.next_u64());
    CHECK(v != ctr.next_u64());
}

TEST_CASE("uniform doubles look uniform") {
    RngStream rng(7, StreamDomain::Generic);
    const long n = 100000;
    double sum = 0.0;
    for (long i = 0; i < n; ++i) {
        const double u = rng.next_double();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    const double mean = sum / n;
    const double se = std::sqrt(1.0 / 12.0 / n);
    CHECK(std::abs(mean - 0.5) < 4.0 * se);
}

TEST_CASE("gaussian moments") {
    RngStream rng(11, StreamDomain::Generic);
    const long n = 100000;
    double sum = 0.0, sum2 = 0.0;
    for (long i = 0; i < n; ++i) {
        const double z = rng.gaussian();
        sum += z;
        sum2 += z * z;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
    // Var of the variance estimator for a normal is 2 sigma^4 / n
    CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("binomial_half matches binomial moments") {
    RngStream rng(13, StreamDomain::Generic);
    const long reps = 20000;
    const uint64_t m = 129;  // crosses two word boundaries
    double sum = 0.0, sum2 = 0.0;
    for (long i = 0; i < reps; ++i) {
        const auto k = rng.binomial_half(m);
        REQUIRE(k <= m);
        sum += static_cast<double>(k);
        sum2 += static_cast<double>(k) * static_cast<double>(k);
    }
    const double mean = sum / reps;
    const double var = sum2 / reps - mean * mean;
    const double expect_mean = m / 2.0;
    const double expect_var = m / 4.0;
    CHECK(std::abs(mean - expect_mean) < 4.0 * std::sqrt(expect_var / reps));
    CHECK(std::abs(var - expect_var) < 4.0 * expect_var * std::sqrt(2.0 / reps));

    RngStream z(13, StreamDomain::Generic, 9);
    CHECK(z.binomial_half(0) == 0);
}

TEST_CASE("categorical frequencies") {
    const std::vector<double> masses = {0.2, 0.5, 0.3};
    RngStream rng(17, StreamDomain::Generic);
    std::vector<long> counts(3, 0);
    const long n = 100000;
    for (long i = 0; i < n; ++i) ++counts[rng.categorical(masses)];
    for (std::size_t i = 0; i < masses.size(); ++i) {
        const double p = masses[i];
        const double freq = static_cast<double>(counts[i]) / n;
        CHECK(std::abs(freq - p) < 4.0 * std::sqrt(p * (1 - p) / n));
    }
}
