#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <optional>
#include <vector>

#include "bitfuse/agents.hpp"

using namespace bitfuse;

namespace {
const std::vector<double> kOrigin2{0.0, 0.0};
const std::vector<double> kThreeFour{3.0, 4.0};
const std::vector<double> kZero{0.0};
}  // namespace

TEST_CASE("closed-ball membership at the boundary") {
    // ||(3,4)|| = 5 exactly: the boundary point votes
    const DecisionRule rule{ClassifyAbstain{5.0}};
    const auto bias = delta_bar(rule, kOrigin2, kThreeFour, 1.0);
    REQUIRE(bias.has_value());
    CHECK(*bias == 1.0);

    const DecisionRule tighter{ClassifyAbstain{4.999999}};
    CHECK_FALSE(delta_bar(tighter, kOrigin2, kThreeFour, 1.0).has_value());
}

TEST_CASE("coin rule guesses outside the ball") {
    const DecisionRule rule{ClassifyCoin{0.5}};
    const std::vector<double> far{2.0};
    const auto bias = delta_bar(rule, kZero, far, 1.0);
    REQUIRE(bias.has_value());
    CHECK(*bias == 0.5);
    const std::vector<double> near{0.25};
    CHECK(*delta_bar(rule, kZero, near, 1.0) == 1.0);
    CHECK(*delta_bar(rule, kZero, near, -1.0) == 0.0);
}

TEST_CASE("clip map") {
    CHECK(clip_map(0.0, 3.0) == 0.5);
    CHECK(clip_map(4.0, 4.0) == 1.0);
    CHECK(clip_map(-4.0, 4.0) == 0.0);
    CHECK(clip_map(5.0, 4.0) == 0.5);  // out of range collapses to a fair coin
    CHECK(clip_map(2.0, 4.0) == 0.75);

    const DecisionRule rule{RegressAbstainClip{1.0, 4.0}};
    const std::vector<double> near{0.5};
    CHECK(*delta_bar(rule, kZero, near, 2.0) == 0.75);
    const std::vector<double> far{9.0};
    CHECK_FALSE(delta_bar(rule, kZero, far, 2.0).has_value());
}

TEST_CASE("clip map inverts exactly on the linear piece") {
    RngStream rng(3, StreamDomain::Generic);
    for (int i = 0; i < 10000; ++i) {
        const double c = rng.uniform(0.1, 50.0);
        const double y = rng.uniform(-c, c);
        const double back = 2.0 * c * (clip_map(y, c) - 0.5);
        CHECK(back == Catch::Approx(y).margin(1e-12 * c));
    }
}

TEST_CASE("respond is a coin with the delta_bar bias") {
    // degenerate biases are certain
    const DecisionRule rule{ClassifyAbstain{1.0}};
    const std::vector<double> near{0.5};
    for (int i = 0; i < 50; ++i) {
        RngStream rng(4, StreamDomain::AgentCoin, 0, 0, static_cast<uint32_t>(i));
        CHECK(respond(rule, kZero, near, 1.0, rng) == Response::One);
        RngStream rng2(4, StreamDomain::AgentCoin, 1, 0, static_cast<uint32_t>(i));
        CHECK(respond(rule, kZero, near, 0.0, rng2) == Response::Zero);
    }

    // bias grid {0, 0.25, 0.5, 0.75, 1} via an explicit table
    const std::vector<double> grid = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (std::size_t g = 0; g < grid.size(); ++g) {
        CustomTable table;
        table.entries = {{{0.0}, {0.0}, 1.0, grid[g]}};
        const DecisionRule tr{table};
        const long n = 100000;
        long ones = 0;
        for (long i = 0; i < n; ++i) {
            RngStream rng(5, StreamDomain::AgentCoin, static_cast<uint32_t>(g),
                          static_cast<uint32_t>(i));
            const Response r = respond(tr, kZero, kZero, 1.0, rng);
            REQUIRE(r != Response::Abstain);
            ones += r == Response::One ? 1 : 0;
        }
        const double freq = static_cast<double>(ones) / n;
        const double sd = std::sqrt(grid[g] * (1.0 - grid[g]) / n);
        CHECK(std::abs(freq - grid[g]) <= 4.0 * sd);
    }
}

TEST_CASE("abstention-free kinds never abstain; all biases lie in [0,1]") {
    RngStream rng(6, StreamDomain::Generic);
    for (int i = 0; i < 2000; ++i) {
        const double r = rng.uniform(0.01, 2.0);
        const std::vector<double> x{rng.uniform(-1.0, 1.0)};
        const std::vector<double> xi{rng.uniform(-1.0, 1.0)};

        const DecisionRule coin{ClassifyCoin{r}};
        const double ypm = rng.bernoulli(0.5) ? 1.0 : -1.0;
        const auto cb = delta_bar(coin, x, xi, ypm);
        REQUIRE(cb.has_value());
        CHECK(*cb >= 0.0);
        CHECK(*cb <= 1.0);

        const DecisionRule clip{RegressAbstainClip{r, rng.uniform(0.1, 10.0)}};
        const auto rb = delta_bar(clip, x, xi, rng.gaussian() * 5.0);
        if (rb) {
            CHECK(*rb >= 0.0);
            CHECK(*rb <= 1.0);
        }

        const DecisionRule vote{ClassifyAbstain{r}};
        const auto vb = delta_bar(vote, x, xi, rng.bernoulli(0.5) ? 1.0 : 0.0);
        if (vb) CHECK((*vb == 0.0 || *vb == 1.0));
    }
}

TEST_CASE("abstaining rules are deterministic where the bias is degenerate") {
    const DecisionRule rule{ClassifyAbstain{0.3}};
    const std::vector<double> xi{0.1};
    for (int i = 0; i < 20; ++i) {
        RngStream rng(7, StreamDomain::AgentCoin, 0, 0, static_cast<uint32_t>(i));
        CHECK(respond(rule, kZero, xi, 1.0, rng) == Response::One);
    }
}

TEST_CASE("rule construction and lookups reject bad input") {
    CHECK_THROWS_AS(DecisionRule{ClassifyAbstain{0.0}}, ConfigError);
    CHECK_THROWS_AS(DecisionRule{RegressAbstainClip{0.5, -1.0}}, ConfigError);
    CustomTable bad;
    bad.entries = {{{0.0}, {0.0}, 1.0, 1.5}};
    CHECK_THROWS_AS(DecisionRule{bad}, ConfigError);

    CustomTable table;
    table.entries = {{{0.0}, {0.0}, 1.0, 0.5}};
    const DecisionRule tr{table};
    const std::vector<double> other{2.0};
    CHECK_THROWS_AS(delta_bar(tr, kZero, other, 1.0), ConfigError);

    const DecisionRule vote{ClassifyAbstain{1.0}};
    CHECK_THROWS_AS(delta_bar(vote, kZero, kZero, -1.0), UsageError);
    const DecisionRule coin{ClassifyCoin{1.0}};
    CHECK_THROWS_AS(delta_bar(coin, kZero, kZero, 0.0), UsageError);
}

TEST_CASE("schedule checks evaluate the exponent conditions") {
    // d=1, beta=1/4: r_n sqrt(n) = n^{1/4} -> inf
    CHECK(schedule_check(RateSchedule(0.5, 0.25), Theorem::T2, 1).valid());
    // d=1, beta=1: r_n sqrt(n) = n^{-1/2} -> 0
    const auto bad = schedule_check(RateSchedule(0.5, 1.0), Theorem::T2, 1);
    CHECK_FALSE(bad.valid());
    REQUIRE(bad.failures().size() == 1);
    CHECK(bad.failures()[0].find("(r_n)^d √n → ∞") != std::string::npos);
    // T3 with beta=1/4, gamma=0.1: c_n^2/(n r_n) = n^{0.2 - 0.75} -> 0
    CHECK(schedule_check(RateSchedule(0.5, 0.25, 2.0, 0.1), Theorem::T3, 1).valid());
    CHECK_FALSE(schedule_check(RateSchedule(0.5, 0.25, 2.0, 0.0), Theorem::T3, 1).valid());
    CHECK_FALSE(schedule_check(RateSchedule(0.5, 0.25, 2.0, 0.4), Theorem::T3, 1).valid());
    // T1 tolerates beta up to 1/d
    CHECK(schedule_check(RateSchedule(0.5, 0.8), Theorem::T1, 1).valid());
    CHECK_FALSE(schedule_check(RateSchedule(0.5, 0.8), Theorem::T1, 2).valid());
    CHECK_FALSE(schedule_check(RateSchedule(0.5, 0.0), Theorem::T1, 1).valid());

    CHECK_THROWS_AS(RateSchedule(-0.5, 0.25), ConfigError);
    CHECK_THROWS_AS(RateSchedule(0.5, -0.25), ConfigError);
}
