#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "bitfuse/distributions.hpp"
#include "bitfuse/shipped.hpp"

using namespace bitfuse;

namespace {

SyntheticDistribution two_amount_atoms() {
    // x0 with P{1}=0.8, x1 with P{1}=0.3, equal masses
    return SyntheticDistribution::discrete_atoms(
        {Atom{{0.0}, 0.5, {{1.0, 0.8}, {0.0, 0.2}}},
         Atom{{1.0}, 0.5, {{1.0, 0.3}, {0.0, 0.7}}}},
        LabelSpace::Binary01);
}

double point(double v, std::vector<double>& buf) {
    buf.assign(1, v);
    return v;
}

}  // namespace

TEST_CASE("degenerate atom law yields identical copies") {
    const auto dist = SyntheticDistribution::discrete_atoms(
        {Atom{{2.0, -1.0}, 1.0, {{7.0, 1.0}}}}, LabelSpace::Real);
    const auto data = sample_training(dist, 3, StreamId{1, 0});
    REQUIRE(data.size() == 3);
    for (long i = 0; i < 3; ++i) {
        CHECK(data.x(i)[0] == 2.0);
        CHECK(data.x(i)[1] == -1.0);
        CHECK(data.y(i) == 7.0);
    }
}

TEST_CASE("uniform marginal mean obeys the CLT bound") {
    const auto dist = shipped::classification_binary01();
    const long n = 10000;
    const auto data = sample_training(dist, n, StreamId{5, 0});
    double sum = 0.0;
    for (long i = 0; i < n; ++i) sum += data.x(i)[0];
    const double mean = sum / n;
    const double sigma = std::sqrt(1.0 / 12.0);
    CHECK(std::abs(mean - 0.5) < 4.0 * sigma / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("sampling is deterministic given the stream key") {
    const auto dist = shipped::regression_gaussian();
    const auto a = sample_training(dist, 200, StreamId{9, 3});
    const auto b = sample_training(dist, 200, StreamId{9, 3});
    REQUIRE(a.size() == b.size());
    for (long i = 0; i < a.size(); ++i) {
        CHECK(a.x(i)[0] == b.x(i)[0]);
        CHECK(a.y(i) == b.y(i));
    }
    // training sets are nested across n for a fixed key
    const auto longer = sample_training(dist, 300, StreamId{9, 3});
    for (long i = 0; i < a.size(); ++i) {
        CHECK(longer.x(i)[0] == a.x(i)[0]);
        CHECK(longer.y(i) == a.y(i));
    }
}

TEST_CASE("regression_fn on the three families") {
    std::vector<double> buf;

    const auto atoms = SyntheticDistribution::discrete_atoms(
        {Atom{{0.0}, 1.0, {{2.0, 0.5}, {0.0, 0.5}}}}, LabelSpace::Real);
    point(0.0, buf);
    CHECK(regression_fn(atoms, buf) == 1.0);

    const auto ramp = SyntheticDistribution::piecewise_linear_eta(
        0.0, 1.0, {{0.0, 0.0}, {1.0, 1.0}}, LabelSpace::Binary01);
    point(0.25, buf);
    CHECK(regression_fn(ramp, buf) == Catch::Approx(0.25));
    // clamping outside the support
    point(-3.0, buf);
    CHECK(regression_fn(ramp, buf) == 0.0);
    point(7.0, buf);
    CHECK(regression_fn(ramp, buf) == 1.0);

    const auto noisy = shipped::regression_gaussian();
    point(0.15, buf);
    CHECK(regression_fn(noisy, buf) == Catch::Approx(-1.0 + 1.8 * 0.5));
}

TEST_CASE("bayes classifier thresholds and tie-break") {
    std::vector<double> buf;
    const auto ramp = SyntheticDistribution::piecewise_linear_eta(
        0.0, 1.0, {{0.0, 0.0}, {1.0, 1.0}}, LabelSpace::Binary01);
    point(0.8, buf);
    CHECK(bayes_classifier(ramp, buf) == 1);
    point(0.5, buf);  // eta = 1/2 exactly: ties go positive
    CHECK(bayes_classifier(ramp, buf) == 1);
    point(0.2, buf);
    CHECK(bayes_classifier(ramp, buf) == 0);

    const auto pm = SyntheticDistribution::piecewise_linear_eta(
        0.0, 1.0, {{0.0, -0.3}, {1.0, -0.3}}, LabelSpace::BinaryPM);
    point(0.4, buf);
    CHECK(bayes_classifier(pm, buf) == -1);

    const auto real = shipped::regression_gaussian();
    point(0.4, buf);
    CHECK_THROWS_AS(bayes_classifier(real, buf), UsageError);
}

TEST_CASE("bayes classifier equals the enumerated argmin on atoms") {
    const auto dist = two_amount_atoms();
    std::vector<double> buf;
    for (double x : {0.0, 1.0}) {
        point(x, buf);
        const auto& atom = dist.atoms()[x == 0.0 ? 0 : 1];
        // expected 0-1 loss of answering g: sum over outcomes of 1{y != g} p
        double best_loss = 1e9;
        int best = -1;
        for (int g : {0, 1}) {
            double loss = 0.0;
            for (const auto& o : atom.label_law)
                if (static_cast<int>(o.y) != g) loss += o.prob;
            if (loss < best_loss) {
                best_loss = loss;
                best = g;
            }
        }
        CHECK(bayes_classifier(dist, buf) == best);
    }
}

TEST_CASE("bayes risk closed forms") {
    CHECK(bayes_risk(two_amount_atoms()) == Catch::Approx(0.25).margin(1e-12));
    CHECK(bayes_risk(shipped::regression_gaussian()) == Catch::Approx(0.04).margin(1e-12));

    const auto deterministic = SyntheticDistribution::discrete_atoms(
        {Atom{{0.0}, 0.4, {{3.0, 1.0}}}, Atom{{1.0}, 0.6, {{-2.0, 1.0}}}}, LabelSpace::Real);
    CHECK(bayes_risk(deterministic) == Catch::Approx(0.0).margin(1e-15));
    CHECK(bayes_risk(shipped::step_binary01()) < 1e-9);
}

TEST_CASE("quadrature bayes risk agrees with Monte Carlo on shipped laws") {
    struct Case {
        SyntheticDistribution dist;
        const char* name;
    };
    const Case cases[] = {
        {shipped::classification_binary01(), "classification01"},
        {shipped::classification_binary_pm(), "classification_pm"},
        {shipped::step_binary01(), "step"},
        {shipped::regression_gaussian(), "regression"},
    };
    for (const auto& c : cases) {
        INFO(c.name);
        const double lstar = bayes_risk(c.dist);
        // Monte Carlo oracle: loss of the Bayes rule on fresh pairs
        const long n = 1000000;
        RngStream rng(77, StreamDomain::Generic);
        std::vector<double> x;
        double y = 0.0;
        double sum = 0.0, sum2 = 0.0;
        const bool classification = c.dist.label_space() != LabelSpace::Real;
        for (long i = 0; i < n; ++i) {
            c.dist.sample_pair(rng, x, y);
            double loss;
            if (classification) {
                loss = bayes_classifier(c.dist, x) != static_cast<int>(y) ? 1.0 : 0.0;
            } else {
                const double e = regression_fn(c.dist, x) - y;
                loss = e * e;
            }
            sum += loss;
            sum2 += loss * loss;
        }
        const double mean = sum / n;
        const double var = sum2 / n - mean * mean;
        const double se = std::sqrt(var / n);
        CHECK(std::abs(mean - lstar) < 4.0 * se);
    }
}

TEST_CASE("atom sampling frequencies match masses") {
    const auto dist = SyntheticDistribution::discrete_atoms(
        {Atom{{0.0}, 0.2, {{1.0, 1.0}}}, Atom{{1.0}, 0.5, {{0.0, 1.0}}},
         Atom{{2.0}, 0.3, {{1.0, 1.0}}}},
        LabelSpace::Binary01);
    const long n = 100000;
    const auto data = sample_training(dist, n, StreamId{123, 0});
    std::vector<long> counts(3, 0);
    for (long i = 0; i < n; ++i) ++counts[static_cast<long>(data.x(i)[0])];
    const double masses[] = {0.2, 0.5, 0.3};
    for (int i = 0; i < 3; ++i) {
        const double p = masses[i];
        const double freq = static_cast<double>(counts[i]) / n;
        CHECK(std::abs(freq - p) <= 4.0 * std::sqrt(p * (1 - p) / n));
    }
}

TEST_CASE("invalid specs are rejected") {
    CHECK_THROWS_AS(SyntheticDistribution::discrete_atoms(
                        {Atom{{0.0}, 0.6, {{1.0, 1.0}}}, Atom{{1.0}, 0.6, {{0.0, 1.0}}}},
                        LabelSpace::Binary01),
                    ConfigError);
    CHECK_THROWS_AS(SyntheticDistribution::discrete_atoms(
                        {Atom{{0.0}, 1.0, {{1.0, 0.7}, {0.0, 0.4}}}}, LabelSpace::Binary01),
                    ConfigError);
    CHECK_THROWS_AS(SyntheticDistribution::discrete_atoms({Atom{{0.0}, 1.0, {{0.5, 1.0}}}},
                                                          LabelSpace::Binary01),
                    ConfigError);
    // eta outside the valid range for the encoding
    CHECK_THROWS_AS(SyntheticDistribution::piecewise_linear_eta(
                        0.0, 1.0, {{0.0, -0.1}, {1.0, 0.5}}, LabelSpace::Binary01),
                    ConfigError);
    // knots must cover the support
    CHECK_THROWS_AS(SyntheticDistribution::piecewise_linear_eta(
                        0.0, 1.0, {{0.2, 0.5}, {1.0, 0.5}}, LabelSpace::Binary01),
                    ConfigError);
    CHECK_THROWS_AS(sample_training(shipped::step_binary01(), 0, StreamId{1, 0}), UsageError);
}

TEST_CASE("ball oracles on the 1-d family") {
    const auto ramp = SyntheticDistribution::piecewise_linear_eta(
        0.0, 1.0, {{0.0, 0.0}, {1.0, 1.0}}, LabelSpace::Binary01);
    std::vector<double> buf;
    point(0.5, buf);
    CHECK(ramp.ball_mass(buf, 0.1) == Catch::Approx(0.2));
    CHECK(ramp.ball_eta_mean(buf, 0.1) == Catch::Approx(0.5));
    point(0.0, buf);  // ball clipped at the support edge
    CHECK(ramp.ball_mass(buf, 0.1) == Catch::Approx(0.1));
    CHECK(ramp.ball_eta_mean(buf, 0.1) == Catch::Approx(0.05));
}
