#pragma once

// Fusion-center rules mapping the n received responses to a label or a real
// estimate. All rules depend on the responses only through vote counts, so
// they are permutation invariant by construction.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "bitfuse/agents.hpp"
#include "bitfuse/common.hpp"

namespace bitfuse {

// Count-level kernels. The ensemble's large-n fast paths feed these the same
// counts the response-level rules compute, so both routes share one law.
namespace fuse_counts {

inline int classify_abstain(long ones, long voters) {
    if (voters == 0) return 0;  // 0/0 = 0 convention: empty ratio falls below 1/2
    return 2 * ones >= voters ? 1 : 0;
}

inline int classify_coin(long ones, long total) {
    // +1 iff the +-1 vote sum is strictly positive; ties lose.
    return 2 * ones - total > 0 ? 1 : -1;
}

inline double regress_abstain(long ones, long voters, double clip) {
    if (voters == 0) return -clip;  // the 0/0 = 0 convention applied to the vote mean
    return 2.0 * clip * (static_cast<double>(ones) / static_cast<double>(voters) - 0.5);
}

}  // namespace fuse_counts

struct FusionInput {
    std::vector<Response> responses;
    std::vector<long> voters;  // indices of non-abstaining agents

    explicit FusionInput(std::vector<Response> r) : responses(std::move(r)) {
        for (long i = 0; i < static_cast<long>(responses.size()); ++i)
            if (responses[static_cast<std::size_t>(i)] != Response::Abstain)
                voters.push_back(i);
    }

    long ones() const {
        long k = 0;
        for (const auto& r : responses)
            if (r == Response::One) ++k;
        return k;
    }
    long size() const { return static_cast<long>(responses.size()); }
    bool has_abstention() const { return voters.size() != responses.size(); }
};

/// Majority vote over the voters; 1 on ties, 0 when everyone abstained.
inline int fuse_classify_abstain(const FusionInput& input) {
    return fuse_counts::classify_abstain(input.ones(), static_cast<long>(input.voters.size()));
}

/// Majority vote under the +-1 encoding (One = +1, Zero = -1); -1 on ties.
inline int fuse_classify_coin(const FusionInput& input) {
    if (input.has_abstention())
        throw ProtocolError("abstention received on a no-abstention channel");
    return fuse_counts::classify_coin(input.ones(), input.size());
}

/// Shift-and-scale of the average vote: 2c(mean - 1/2); -c when no one voted.
inline double fuse_regress_abstain(const FusionInput& input, double clip) {
    if (clip <= 0.0) throw UsageError("fuse_regress_abstain: clip must be positive");
    return fuse_counts::regress_abstain(input.ones(), static_cast<long>(input.voters.size()),
                                        clip);
}

/// A scalar map of the bit mean with a declared Lipschitz constant. Applied
/// to same-length bit vectors it is permutation invariant and Lipschitz in
/// the average Hamming distance with that constant.
struct ScalarTransfer {
    std::string name;
    double lipschitz = 0.0;
    std::function<double(double)> fn;

    double operator()(double mean) const { return fn(mean); }
};

inline double fuse_mean_lipschitz(const FusionInput& input, const ScalarTransfer& transfer) {
    if (input.has_abstention())
        throw ProtocolError("abstention received on a no-abstention channel");
    if (input.size() == 0) throw UsageError("fuse_mean_lipschitz: empty response vector");
    const double mean = static_cast<double>(input.ones()) / static_cast<double>(input.size());
    return transfer(mean);
}

}  // namespace bitfuse
