#pragma once

// Agent-side decision rules delta_bar(x, X_i, Y_i) and the randomized
// mechanism that turns a bias (or an abstention) into the transmitted
// trit/bit. An agent abstains outright, or flips a coin whose bias is the
// value of delta_bar; it never randomizes the decision to abstain.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bitfuse/common.hpp"
#include "bitfuse/rng.hpp"

namespace bitfuse {

enum class Response : uint8_t { Abstain, One, Zero };

/// Piecewise-linear clipping map T: [-c, c] -> [0, 1] affinely, 1/2 elsewhere.
inline double clip_map(double y, double clip) {
    if (clip <= 0.0) throw UsageError("clip_map: clip level must be positive");
    if (std::abs(y) <= clip) return y / (2.0 * clip) + 0.5;
    return 0.5;
}

/// Radius/clip sequences r_n = r0 * n^-beta, c_n = c0 * n^gamma.
struct RateSchedule {
    double r0 = 0.5;
    double beta = 0.25;
    double c0 = 1.0;
    double gamma = 0.0;

    RateSchedule() = default;
    RateSchedule(double r0_, double beta_, double c0_ = 1.0, double gamma_ = 0.0)
        : r0(r0_), beta(beta_), c0(c0_), gamma(gamma_) {
        if (!(r0 > 0.0) || !(c0 > 0.0))
            throw ConfigError("rate schedule: r0 and c0 must be positive");
        if (beta < 0.0 || gamma < 0.0)
            throw ConfigError("rate schedule: beta and gamma must be nonnegative");
    }

    double radius(long n) const { return r0 * std::pow(static_cast<double>(n), -beta); }
    double clip(long n) const { return c0 * std::pow(static_cast<double>(n), gamma); }
};

struct CustomTableEntry {
    std::vector<double> x_query;
    std::vector<double> x_train;
    double y_train = 0.0;
    double value = 0.0;  // coin bias in [0,1]
};

// ClassifyAbstain: vote own label while the query is inside the ball.
// ClassifyCoin:    vote own +-1 label inside the ball, fair coin outside.
// RegressAbstainClip: clipped-label coin inside the ball, abstain outside.
// CustomTable:     explicit bias table over a finite grid.
struct ClassifyAbstain {
    double radius = 0.0;
};
struct ClassifyCoin {
    double radius = 0.0;
};
struct RegressAbstainClip {
    double radius = 0.0;
    double clip = 0.0;
};
struct CustomTable {
    std::vector<CustomTableEntry> entries;
};

class DecisionRule {
public:
    using Spec = std::variant<ClassifyAbstain, ClassifyCoin, RegressAbstainClip, CustomTable>;

    DecisionRule(Spec spec) : spec_(std::move(spec)) { validate(); }

    const Spec& spec() const { return spec_; }

    bool may_abstain() const {
        return std::holds_alternative<ClassifyAbstain>(spec_) ||
               std::holds_alternative<RegressAbstainClip>(spec_);
    }

private:
    void validate() const {
        if (const auto* r = std::get_if<ClassifyAbstain>(&spec_)) {
            if (!(r->radius > 0.0)) throw ConfigError("radius must be positive");
        } else if (const auto* r = std::get_if<ClassifyCoin>(&spec_)) {
            if (!(r->radius > 0.0)) throw ConfigError("radius must be positive");
        } else if (const auto* r = std::get_if<RegressAbstainClip>(&spec_)) {
            if (!(r->radius > 0.0)) throw ConfigError("radius must be positive");
            if (!(r->clip > 0.0)) throw ConfigError("clip level must be positive");
        } else if (const auto* t = std::get_if<CustomTable>(&spec_)) {
            for (const auto& e : t->entries)
                if (e.value < 0.0 || e.value > 1.0)
                    throw ConfigError("table bias outside [0,1]");
        }
    }

    Spec spec_;
};

/// The bias an agent would use for its coin, or nullopt to abstain.
inline std::optional<double> delta_bar(const DecisionRule& rule, PointView x, PointView xi,
                                       double yi) {
    if (const auto* r = std::get_if<ClassifyAbstain>(&rule.spec())) {
        if (yi != 0.0 && yi != 1.0)
            throw UsageError("ClassifyAbstain expects labels in {0,1}");
        if (in_closed_ball(xi, x, r->radius)) return yi;
        return std::nullopt;
    }
    if (const auto* r = std::get_if<ClassifyCoin>(&rule.spec())) {
        if (yi != 1.0 && yi != -1.0)
            throw UsageError("ClassifyCoin expects labels in {-1,+1}");
        if (in_closed_ball(xi, x, r->radius)) return 0.5 * yi + 0.5;
        return 0.5;
    }
    if (const auto* r = std::get_if<RegressAbstainClip>(&rule.spec())) {
        if (in_closed_ball(xi, x, r->radius)) return clip_map(yi, r->clip);
        return std::nullopt;
    }
    const auto& table = std::get<CustomTable>(rule.spec());
    for (const auto& e : table.entries) {
        if (e.y_train == yi && std::equal(e.x_query.begin(), e.x_query.end(), x.begin(), x.end()) &&
            std::equal(e.x_train.begin(), e.x_train.end(), xi.begin(), xi.end()))
            return e.value;
    }
    throw ConfigError("custom table has no entry for this (x, x_i, y_i)");
}

/// One agent's transmitted symbol: Abstain iff delta_bar abstains, else One
/// with probability delta_bar and Zero otherwise. Independent across agents
/// when each gets its own stream.
inline Response respond(const DecisionRule& rule, PointView x, PointView xi, double yi,
                        RngStream& rng) {
    const auto bias = delta_bar(rule, x, xi, yi);
    if (!bias) return Response::Abstain;
    return rng.bernoulli(*bias) ? Response::One : Response::Zero;
}

enum class Theorem { T1, T2, T3 };

struct ScheduleCondition {
    std::string description;
    bool pass = false;
};

struct ScheduleReport {
    Theorem theorem = Theorem::T1;
    std::vector<ScheduleCondition> conditions;

    bool valid() const {
        for (const auto& c : conditions)
            if (!c.pass) return false;
        return true;
    }
    std::vector<std::string> failures() const {
        std::vector<std::string> out;
        for (const auto& c : conditions)
            if (!c.pass) out.push_back(c.description);
        return out;
    }
};

/// Checks the asymptotic consistency conditions of a parametric schedule on
/// the exponents alone: r_n^d n -> inf iff d*beta < 1, and so on.
inline ScheduleReport schedule_check(const RateSchedule& s, Theorem theorem, int d) {
    if (d < 1) throw UsageError("schedule_check: dimension must be >= 1");
    const double db = d * s.beta;
    ScheduleReport report;
    report.theorem = theorem;
    const ScheduleCondition radius_to_zero{"r_n → 0 (requires beta > 0)", s.beta > 0.0};
    switch (theorem) {
        case Theorem::T1:
            report.conditions.push_back(radius_to_zero);
            report.conditions.push_back(
                {"(r_n)^d n → ∞ (requires d·beta < 1)", db < 1.0});
            break;
        case Theorem::T2:
            report.conditions.push_back(radius_to_zero);
            report.conditions.push_back(
                {"(r_n)^d √n → ∞ (requires d·beta < 1/2)", db < 0.5});
            break;
        case Theorem::T3:
            report.conditions.push_back({"c_n → ∞ (requires gamma > 0)", s.gamma > 0.0});
            report.conditions.push_back(radius_to_zero);
            report.conditions.push_back(
                {"c_n²/(n r_n^d) → 0 (requires 2·gamma + d·beta < 1)",
                 2.0 * s.gamma + db < 1.0});
            break;
    }
    return report;
}

}  // namespace bitfuse
