#pragma once

// The two-distribution construction behind the impossibility result for
// regression without abstention. A pair of two-point laws with swapped
// labels is built so that, at query x0, the bit stream reaching the fusion
// center has exactly the same law under both; no permutation-invariant,
// Hamming-Lipschitz fusion rule can then be right about both regression
// functions at once.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "bitfuse/agents.hpp"
#include "bitfuse/common.hpp"
#include "bitfuse/distributions.hpp"
#include "bitfuse/fusion.hpp"
#include "bitfuse/rng.hpp"

namespace bitfuse {

/// delta_bar values at query x0, one per reachable training datum.
struct DeltaTable {
    double at_x0_y0 = 0.0;  // delta_bar(x0, x0, y0)
    double at_x1_y1 = 0.0;  // delta_bar(x0, x1, y1)
    double at_x0_y1 = 0.0;  // delta_bar(x0, x0, y1)
    double at_x1_y0 = 0.0;  // delta_bar(x0, x1, y0)
};

/// Solves the bit-statistics matching condition for the auxiliary mass
/// P_{X'}{x1}. Under the primary law, P{bit = 1 | query x0} equals
/// s = d(x0,y0) q + d(x1,y1)(1-q); under the label-swapped law with mass p1
/// at x1 it equals d(x0,y1)(1-p1) + d(x1,y0) p1. Setting the two equal gives
/// p1 = (d(x0,y1) - s) / (d(x0,y1) - d(x1,y0)).
inline double build_auxiliary(const DeltaTable& table, double q) {
    if (!(q > 0.0) || !(q < 1.0)) throw ConfigError("counterexample: q must be in (0,1)");
    for (double v : {table.at_x0_y0, table.at_x1_y1, table.at_x0_y1, table.at_x1_y0})
        if (v < 0.0 || v > 1.0) throw ConfigError("counterexample: table value outside [0,1]");
    const double target = table.at_x0_y0 * q + table.at_x1_y1 * (1.0 - q);
    const double denom = table.at_x0_y1 - table.at_x1_y0;
    if (std::abs(denom) < 1e-6)
        throw ConfigError(
            "counterexample rejected: matching equation degenerate "
            "(delta(x0,y1) - delta(x1,y0) ~ 0)");
    const double p1 = (table.at_x0_y1 - target) / denom;
    if (p1 < 0.0 || p1 > 1.0)
        throw ConfigError("counterexample rejected: auxiliary mass " + std::to_string(p1) +
                          " outside [0,1]");
    return p1;
}

struct CounterexampleInstance {
    std::vector<double> x0;
    std::vector<double> x1;
    double y0 = 0.0;
    double y1 = 0.0;
    double q = 0.0;        // P_X{x0}
    DeltaTable table;
    double aux_p1 = 0.0;   // P_{X'}{x1}, from build_auxiliary

    static CounterexampleInstance make(std::vector<double> x0, std::vector<double> x1,
                                       double y0, double y1, double q, DeltaTable table) {
        if (y0 == y1) throw ConfigError("counterexample: y0 and y1 must differ");
        if (x0 == x1) throw ConfigError("counterexample: x0 and x1 must differ");
        CounterexampleInstance inst;
        inst.x0 = std::move(x0);
        inst.x1 = std::move(x1);
        inst.y0 = y0;
        inst.y1 = y1;
        inst.q = q;
        inst.table = table;
        inst.aux_p1 = build_auxiliary(table, q);
        return inst;
    }

    /// P_XY: mass q at (x0, y0), mass 1-q at (x1, y1). eta(xi) = yi.
    SyntheticDistribution primary_law() const {
        return SyntheticDistribution::discrete_atoms(
            {Atom{x0, q, {{y0, 1.0}}}, Atom{x1, 1.0 - q, {{y1, 1.0}}}}, LabelSpace::Real);
    }

    /// P_X'Y': labels swapped, mass aux_p1 at x1. eta'(xi) = y_{1-i}.
    SyntheticDistribution auxiliary_law() const {
        return SyntheticDistribution::discrete_atoms(
            {Atom{x0, 1.0 - aux_p1, {{y1, 1.0}}}, Atom{x1, aux_p1, {{y0, 1.0}}}},
            LabelSpace::Real);
    }

    /// The agents' rule as an explicit bias table over the four reachable
    /// (x0, x_i, y_i) triples.
    DecisionRule rule() const {
        CustomTable t;
        t.entries = {
            {x0, x0, y0, table.at_x0_y0},
            {x0, x1, y1, table.at_x1_y1},
            {x0, x0, y1, table.at_x0_y1},
            {x0, x1, y0, table.at_x1_y0},
        };
        return DecisionRule{t};
    }

    /// P{bit = 1 | query x0} when agents train on the primary law.
    double bit_mean_primary() const {
        return table.at_x0_y0 * q + table.at_x1_y1 * (1.0 - q);
    }

    /// Same statistic when agents train on the auxiliary law.
    double bit_mean_auxiliary() const {
        return table.at_x0_y1 * (1.0 - aux_p1) + table.at_x1_y0 * aux_p1;
    }

    /// Lower bound on the max-over-pair excess risk at x0 for any single
    /// prediction: the two laws feed a rule identical bits, so whatever value
    /// it outputs is at least (y0-y1)^2/4 wrong (in squared error) for one of
    /// the targets, weighted by the smaller query mass at x0.
    double irreducibility() const {
        const double w = std::min(q, 1.0 - aux_p1);
        const double d = y0 - y1;
        return d * d * w / 4.0;
    }
};

enum class MatchCheck { Exact, MonteCarlo };

/// Maximum absolute difference between the two bit laws at query x0:
/// exact mixture arithmetic, or an empirical comparison of two simulated
/// bit streams of length n.
inline double verify_match(const CounterexampleInstance& inst, long n, MatchCheck mode,
                           uint64_t seed = 0) {
    if (mode == MatchCheck::Exact)
        return std::abs(inst.bit_mean_primary() - inst.bit_mean_auxiliary());
    if (n < 1) throw UsageError("verify_match: need at least one bit");
    const DecisionRule rule = inst.rule();
    const SyntheticDistribution laws[2] = {inst.primary_law(), inst.auxiliary_law()};
    double mean[2] = {0.0, 0.0};
    std::vector<double> xi;
    double yi = 0.0;
    for (int side = 0; side < 2; ++side) {
        long ones = 0;
        for (long i = 0; i < n; ++i) {
            RngStream rng(seed, StreamDomain::Witness, static_cast<uint32_t>(side),
                          static_cast<uint32_t>(i));
            laws[side].sample_pair(rng, xi, yi);
            ones += respond(rule, inst.x0, xi, yi, rng) == Response::One ? 1 : 0;
        }
        mean[side] = static_cast<double>(ones) / static_cast<double>(n);
    }
    return std::abs(mean[0] - mean[1]);
}

struct GapRow {
    std::string rule;
    long n = 0;
    double gap_p = 0.0;       // q * E{(prediction - y0)^2} at query x0, primary law
    double gap_pprime = 0.0;  // (1 - aux_p1) * E{(prediction - y1)^2}, auxiliary law
    double max_gap = 0.0;
};

struct GapTable {
    std::vector<GapRow> rows;
    double irreducibility = 0.0;
};

/// The mean-transfer fusion family swept by the witness: the section-V style
/// affine readouts plus the best-possible constant fits to each law. Every
/// member is permutation invariant and Lipschitz in the average Hamming
/// distance with the stated constant.
inline std::vector<ScalarTransfer> default_transfer_family(const CounterexampleInstance& inst) {
    const double y0 = inst.y0, y1 = inst.y1;
    return {
        {"identity", 1.0, [](double m) { return m; }},
        {"centered_scale_2", 2.0, [](double m) { return 2.0 * (m - 0.5); }},
        {"oracle_fit_p", 0.0, [y0](double) { return y0; }},
        {"oracle_fit_pprime", 0.0, [y1](double) { return y1; }},
        {"midpoint", 0.0, [y0, y1](double) { return 0.5 * (y0 + y1); }},
    };
}

/// Estimates, for each fusion rule and each n, the excess squared-error risk
/// at query x0 under both laws, and the max over the pair. Trains `trials`
/// fresh ensembles per (n, law); every rule reads the same simulated bits.
inline GapTable inconsistency_report(const CounterexampleInstance& inst,
                                     const std::vector<ScalarTransfer>& transfers,
                                     const std::vector<long>& n_list, long trials,
                                     uint64_t seed) {
    if (trials < 1) throw UsageError("inconsistency_report: trials >= 1");
    if (transfers.empty()) throw UsageError("inconsistency_report: empty transfer family");
    const DecisionRule rule = inst.rule();
    const SyntheticDistribution laws[2] = {inst.primary_law(), inst.auxiliary_law()};
    const double target[2] = {inst.y0, inst.y1};
    const double mass[2] = {inst.q, 1.0 - inst.aux_p1};

    GapTable out;
    out.irreducibility = inst.irreducibility();
    std::vector<double> xi;
    double yi = 0.0;
    for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
        const long n = n_list[ni];
        // loss_sum[rule][side]
        std::vector<std::array<double, 2>> loss_sum(transfers.size(), {0.0, 0.0});
        for (int side = 0; side < 2; ++side) {
            for (long t = 0; t < trials; ++t) {
                std::vector<Response> bits;
                bits.reserve(static_cast<std::size_t>(n));
                for (long i = 0; i < n; ++i) {
                    RngStream rng(seed, StreamDomain::Witness,
                                  static_cast<uint32_t>(t),
                                  static_cast<uint32_t>(2 * ni + side),
                                  static_cast<uint32_t>(i));
                    laws[side].sample_pair(rng, xi, yi);
                    bits.push_back(respond(rule, inst.x0, xi, yi, rng));
                }
                const FusionInput input(std::move(bits));
                for (std::size_t r = 0; r < transfers.size(); ++r) {
                    const double pred = fuse_mean_lipschitz(input, transfers[r]);
                    const double e = pred - target[side];
                    loss_sum[r][side] += e * e;
                }
            }
        }
        for (std::size_t r = 0; r < transfers.size(); ++r) {
            GapRow row;
            row.rule = transfers[r].name;
            row.n = n;
            row.gap_p = mass[0] * loss_sum[r][0] / static_cast<double>(trials);
            row.gap_pprime = mass[1] * loss_sum[r][1] / static_cast<double>(trials);
            row.max_gap = std::max(row.gap_p, row.gap_pprime);
            out.rows.push_back(row);
        }
    }
    return out;
}

}  // namespace bitfuse
