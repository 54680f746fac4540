#pragma once

// The example distributions and the counterexample instance used by the
// shipped experiment manifests. Tests assert that the manifests stay in sync
// with these definitions.

#include "bitfuse/counterexample.hpp"
#include "bitfuse/distributions.hpp"

namespace bitfuse::shipped {

// Uniform X on [0,1] with a piecewise-linear eta built from two parts:
// a square-wave stretch (period 0.25) that a radius ~0.3 window cannot
// resolve but a radius ~0.1 window can, and a wide shallow crossing whose
// eta profile approximates a parabola, so the no-abstention ensemble keeps
// a measurable (and slowly shrinking) error deep into large n.
inline std::vector<EtaKnot> classification_eta01() {
    return {
        {0.000, 0.975},  {0.105, 0.975},  {0.125, 0.025},   {0.230, 0.025},
        {0.250, 0.975},  {0.355, 0.975},  {0.375, 0.025},   {0.480, 0.025},
        {0.500, 0.975},  {0.600, 0.975},  {0.650, 0.7671875},
        {0.700, 0.61875},{0.750, 0.5296875}, {0.800, 0.5},  {0.850, 0.4703125},
        {0.900, 0.38125},{0.950, 0.2328125}, {1.000, 0.025},
    };
}

inline SyntheticDistribution classification_binary01() {
    return SyntheticDistribution::piecewise_linear_eta(0.0, 1.0, classification_eta01(),
                                                       LabelSpace::Binary01);
}

/// Same law in the +-1 encoding: eta_pm = 2 eta01 - 1 at every knot.
inline SyntheticDistribution classification_binary_pm() {
    auto knots = classification_eta01();
    for (auto& k : knots) k.eta = 2.0 * k.eta - 1.0;
    return SyntheticDistribution::piecewise_linear_eta(0.0, 1.0, std::move(knots),
                                                       LabelSpace::BinaryPM);
}

/// Deterministic labels: Y = 1 on [0, 0.5], Y = 0 above (a 1e-10 wide ramp
/// stands in for the jump). L* is numerically zero.
inline SyntheticDistribution step_binary01() {
    return SyntheticDistribution::piecewise_linear_eta(
        0.0, 1.0, {{0.0, 1.0}, {0.5, 1.0}, {0.5 + 1e-10, 0.0}, {1.0, 0.0}},
        LabelSpace::Binary01);
}

/// 1-d regression: zigzag eta with Gaussian(sigma^2 = 0.04) noise, L* = 0.04.
inline SyntheticDistribution regression_gaussian() {
    return SyntheticDistribution::regression_additive_noise(
        0.0, 1.0, {{0.0, -1.0}, {0.3, 0.8}, {0.7, -0.6}, {1.0, 1.0}},
        NoiseLaw{NoiseLaw::Kind::Gaussian, 0.04});
}

/// Two atoms at 0 and 1 with +-1 labels; eta0, eta1 are the conditional
/// means P{+1|x} - P{-1|x} at the atoms.
inline SyntheticDistribution two_atom_margin(double eta0, double eta1, double q) {
    const auto law = [](double eta) {
        return std::vector<LabelOutcome>{{1.0, 0.5 * (1.0 + eta)}, {-1.0, 0.5 * (1.0 - eta)}};
    };
    return SyntheticDistribution::discrete_atoms(
        {Atom{{0.0}, q, law(eta0)}, Atom{{1.0}, 1.0 - q, law(eta1)}}, LabelSpace::BinaryPM);
}

/// The counterexample instance the witness experiments run.
inline CounterexampleInstance witness() {
    return CounterexampleInstance::make({0.0}, {1.0}, 0.0, 1.0, 0.5,
                                        DeltaTable{0.9, 0.2, 0.6, 0.3});
}

}  // namespace bitfuse::shipped
