#pragma once

// Train-once/query-many simulation of the four communication models,
// Monte Carlo estimation of E{L_n}, sweeps over n under a rate schedule,
// and the margin diagnostics of the no-abstention classification model.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <thread>
#include <variant>
#include <vector>

#include "bitfuse/agents.hpp"
#include "bitfuse/common.hpp"
#include "bitfuse/distributions.hpp"
#include "bitfuse/fusion.hpp"
#include "bitfuse/numeric.hpp"
#include "bitfuse/rng.hpp"

namespace bitfuse {

enum class ModelKind {
    ClassifyWithAbstention,
    ClassifyNoAbstention,
    RegressWithAbstention,
    RegressNoAbstention,
};

inline std::string to_string(ModelKind m) {
    switch (m) {
        case ModelKind::ClassifyWithAbstention: return "classify_with_abstention";
        case ModelKind::ClassifyNoAbstention: return "classify_no_abstention";
        case ModelKind::RegressWithAbstention: return "regress_with_abstention";
        case ModelKind::RegressNoAbstention: return "regress_no_abstention";
    }
    return "?";
}

inline LabelSpace required_label_space(ModelKind m) {
    switch (m) {
        case ModelKind::ClassifyWithAbstention: return LabelSpace::Binary01;
        case ModelKind::ClassifyNoAbstention: return LabelSpace::BinaryPM;
        default: return LabelSpace::Real;
    }
}

inline Theorem theorem_for(ModelKind m) {
    switch (m) {
        case ModelKind::ClassifyWithAbstention: return Theorem::T1;
        case ModelKind::ClassifyNoAbstention: return Theorem::T2;
        case ModelKind::RegressWithAbstention: return Theorem::T3;
        case ModelKind::RegressNoAbstention:
            throw UsageError("no consistency theorem covers regression without abstention");
    }
    throw UsageError("unknown model");
}

using Prediction = std::variant<int, double>;

struct RiskEstimate {
    long n = 0;
    double mean_risk = 0.0;
    double std_error = 0.0;
    long trials = 0;
    long queries = 0;
    double bayes_risk = 0.0;
    double gap = 0.0;
};

struct MarginStats {
    std::vector<double> x;
    long n = 0;
    double m_n = 0.0;          // Monte Carlo estimate of E{eta(X) delta | X = x}
    double sigma2_n = 0.0;     // Monte Carlo estimate of the margin variance
    double m_n_se = 0.0;
    double sigma2_n_se = 0.0;
    double m_n_closed = 0.0;   // eta(x) * eta_bar_n * P{X_i in B_r(x)} from the oracle
    double sigma2_closed = 0.0;
    double eta_bar_n = 0.0;    // ball-averaged regression function
    double ball_mass = 0.0;
};

struct EnsembleOptions {
    // Model II: sample the guessing agents' vote sum as one Binomial(n-k, 1/2)
    // draw instead of n-k coins. Distributionally exact.
    bool aggregate_guessers = true;
    int threads = 0;  // 0 = hardware concurrency; never affects results
};

struct QueryKey {
    uint64_t seed = 0;
    uint32_t trial = 0;
    uint32_t query = 0;
};

// A trained ensemble: one agent per training datum, ready to answer queries.
// 1-d training sets are indexed by a sort on X so a query only touches the
// agents inside its ball; other dimensions fall back to a linear scan.
class Ensemble {
public:
    Ensemble(ModelKind model, const TrainingSet& data, const RateSchedule& schedule,
             EnsembleOptions options = {})
        : model_(model), data_(&data), options_(options) {
        if (model == ModelKind::RegressNoAbstention)
            throw UsageError(
                "regression without abstention has no canonical rule; "
                "use the counterexample harness");
        const long n = data.size();
        if (n < 1) throw UsageError("ensemble needs at least one agent");
        radius_ = schedule.radius(n);
        clip_ = schedule.clip(n);
        check_labels();
        if (data.dimension() == 1) build_sorted_index();
    }

    ModelKind model() const { return model_; }
    double radius() const { return radius_; }
    double clip() const { return clip_; }

    Prediction predict(PointView x, QueryKey key) const {
        long voters = 0, ones = 0;
        gather_voters(x, key, voters, ones);
        const long n = data_->size();
        switch (model_) {
            case ModelKind::ClassifyWithAbstention:
                return fuse_counts::classify_abstain(ones, voters);
            case ModelKind::ClassifyNoAbstention: {
                long total_ones = ones;
                const long guessers = n - voters;
                if (options_.aggregate_guessers) {
                    RngStream rng(key.seed, StreamDomain::GuessSum, key.trial, key.query);
                    total_ones += static_cast<long>(
                        rng.binomial_half(static_cast<uint64_t>(guessers)));
                } else {
                    // slow path: every out-of-ball agent flips its own fair coin
                    total_ones += per_agent_guesses(x, key);
                }
                return fuse_counts::classify_coin(total_ones, n);
            }
            case ModelKind::RegressWithAbstention:
                return fuse_counts::regress_abstain(ones, voters, clip_);
            default:
                throw UsageError("unsupported model");
        }
    }

private:
    void check_labels() const {
        const LabelSpace want = required_label_space(model_);
        for (long i = 0; i < data_->size(); ++i) {
            const double y = data_->y(i);
            if (want == LabelSpace::Binary01 && y != 0.0 && y != 1.0)
                throw UsageError("training labels incompatible with model (need {0,1})");
            if (want == LabelSpace::BinaryPM && y != 1.0 && y != -1.0)
                throw UsageError("training labels incompatible with model (need {-1,+1})");
        }
    }

    void build_sorted_index() {
        const long n = data_->size();
        order_.resize(static_cast<std::size_t>(n));
        std::iota(order_.begin(), order_.end(), 0L);
        std::sort(order_.begin(), order_.end(),
                  [this](long a, long b) { return data_->x(a)[0] < data_->x(b)[0]; });
        sorted_x_.resize(order_.size());
        prefix_ones_.assign(order_.size() + 1, 0);
        for (std::size_t i = 0; i < order_.size(); ++i) {
            sorted_x_[i] = data_->x(order_[i])[0];
            prefix_ones_[i + 1] = prefix_ones_[i] + (data_->y(order_[i]) == 1.0 ? 1 : 0);
        }
    }

    // Counts voters and, for the classification models, their One-votes.
    // Model III draws each voter's coin here.
    void gather_voters(PointView x, QueryKey key, long& voters, long& ones) const {
        voters = 0;
        ones = 0;
        if (data_->dimension() == 1) {
            const double q = x[0];
            const auto lo = std::lower_bound(sorted_x_.begin(), sorted_x_.end(), q - radius_);
            const auto hi = std::upper_bound(sorted_x_.begin(), sorted_x_.end(), q + radius_);
            const long a = lo - sorted_x_.begin();
            const long b = hi - sorted_x_.begin();
            voters = b - a;
            if (model_ == ModelKind::RegressWithAbstention) {
                for (long i = a; i < b; ++i) ones += voter_coin(order_[i], key);
            } else {
                ones = prefix_ones_[b] - prefix_ones_[a];
            }
            return;
        }
        for (long i = 0; i < data_->size(); ++i) {
            if (!in_closed_ball(data_->x(i), x, radius_)) continue;
            ++voters;
            if (model_ == ModelKind::RegressWithAbstention)
                ones += voter_coin(i, key);
            else
                ones += data_->y(i) == 1.0 ? 1 : 0;
        }
    }

    long voter_coin(long agent, QueryKey key) const {
        const double bias = clip_map(data_->y(agent), clip_);
        RngStream rng(key.seed, StreamDomain::AgentCoin, key.trial, key.query,
                      static_cast<uint32_t>(agent));
        return rng.bernoulli(bias) ? 1 : 0;
    }

    long per_agent_guesses(PointView x, QueryKey key) const {
        long ones = 0;
        for (long i = 0; i < data_->size(); ++i) {
            if (in_closed_ball(data_->x(i), x, radius_)) continue;
            RngStream rng(key.seed, StreamDomain::AgentCoin, key.trial, key.query,
                          static_cast<uint32_t>(i));
            ones += rng.bernoulli(0.5) ? 1 : 0;
        }
        return ones;
    }

    ModelKind model_;
    const TrainingSet* data_;
    EnsembleOptions options_;
    double radius_ = 0.0;
    double clip_ = 0.0;
    std::vector<long> order_;
    std::vector<double> sorted_x_;
    std::vector<long> prefix_ones_;
};

/// Broadcast x to the ensemble built from `training`, draw the agents'
/// responses, and fuse them with the model's rule.
inline Prediction predict(ModelKind model, const TrainingSet& training,
                          const RateSchedule& schedule, PointView x, QueryKey key,
                          EnsembleOptions options = {}) {
    return Ensemble(model, training, schedule, options).predict(x, key);
}

namespace detail {

template <typename F>
void parallel_trials(long trials, int threads, F&& body) {
    if (threads <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        threads = hw > 0 ? static_cast<int>(hw) : 1;
    }
    threads = static_cast<int>(std::min<long>(threads, trials));
    if (threads <= 1) {
        for (long t = 0; t < trials; ++t) body(t);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w]() {
            for (long t = w; t < trials; t += threads) body(t);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace detail

/// Monte Carlo estimate of E{L_n}: each trial trains a fresh ensemble of
/// size n and scores it on fresh i.i.d. query pairs (0-1 loss for the
/// classification models, squared error for regression). The standard error
/// is taken across trials, since L_n is itself random through D_n.
inline RiskEstimate estimate_risk(ModelKind model, const SyntheticDistribution& dist,
                                  const RateSchedule& schedule, long n, long trials,
                                  long queries, uint64_t seed, EnsembleOptions options = {}) {
    if (trials < 1 || queries < 1) throw UsageError("estimate_risk: trials, queries >= 1");
    if (dist.label_space() != required_label_space(model))
        throw UsageError("distribution label space incompatible with model " + to_string(model));
    const bool classification = model == ModelKind::ClassifyWithAbstention ||
                                model == ModelKind::ClassifyNoAbstention;

    std::vector<double> trial_risk(static_cast<std::size_t>(trials), 0.0);
    detail::parallel_trials(trials, options.threads, [&](long t) {
        const TrainingSet data =
            sample_training(dist, n, StreamId{seed, static_cast<uint32_t>(t)});
        const Ensemble ensemble(model, data, schedule, options);
        std::vector<double> x;
        double y = 0.0;
        double loss_sum = 0.0;
        for (long q = 0; q < queries; ++q) {
            RngStream qrng(seed, StreamDomain::Query, static_cast<uint32_t>(t),
                           static_cast<uint32_t>(q));
            dist.sample_pair(qrng, x, y);
            const Prediction pred = ensemble.predict(
                x, QueryKey{seed, static_cast<uint32_t>(t), static_cast<uint32_t>(q)});
            if (classification) {
                loss_sum += std::get<int>(pred) != static_cast<int>(y) ? 1.0 : 0.0;
            } else {
                const double e = std::get<double>(pred) - y;
                loss_sum += e * e;
            }
        }
        trial_risk[static_cast<std::size_t>(t)] = loss_sum / static_cast<double>(queries);
    });

    const MeanSe ms = mean_and_se(trial_risk);
    RiskEstimate est;
    est.n = n;
    est.mean_risk = ms.mean;
    est.std_error = ms.se;
    est.trials = trials;
    est.queries = queries;
    est.bayes_risk = bayes_risk(dist);
    est.gap = est.mean_risk - est.bayes_risk;
    return est;
}

/// One RiskEstimate per n, in order, under a shared base seed. Query pairs
/// and training prefixes are reused across n (common random numbers), which
/// sharpens gap comparisons without changing any single estimate's law.
inline std::vector<RiskEstimate> convergence_sweep(ModelKind model,
                                                   const SyntheticDistribution& dist,
                                                   const RateSchedule& schedule,
                                                   const std::vector<long>& n_list, long trials,
                                                   long queries, uint64_t seed,
                                                   EnsembleOptions options = {}) {
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1])
            throw UsageError("convergence_sweep: n_list must be strictly increasing");
    std::vector<RiskEstimate> out;
    out.reserve(n_list.size());
    for (long n : n_list)
        out.push_back(estimate_risk(model, dist, schedule, n, trials, queries, seed, options));
    return out;
}

/// Monte Carlo margin statistics m_n(x), sigma_n^2(x) for the no-abstention
/// classification model, next to their closed forms computed from the
/// distribution oracle.
inline MarginStats margin_stats(const SyntheticDistribution& dist, const RateSchedule& schedule,
                                PointView x, long n, long mc_samples, uint64_t seed) {
    if (mc_samples < 1) throw UsageError("margin_stats: mc_samples >= 1");
    if (dist.label_space() != LabelSpace::BinaryPM)
        throw UsageError("margin_stats applies to the +-1 classification model");
    const double r = schedule.radius(n);
    const DecisionRule rule{ClassifyCoin{r}};
    const double eta_x = dist.eta(x);

    double sum = 0.0, sum2 = 0.0, sum3 = 0.0, sum4 = 0.0;
    std::vector<double> xi;
    double yi = 0.0;
    for (long s = 0; s < mc_samples; ++s) {
        RngStream rng(seed, StreamDomain::MarginSample, 0, static_cast<uint32_t>(s));
        dist.sample_pair(rng, xi, yi);
        const Response resp = respond(rule, x, xi, yi, rng);
        const double delta = resp == Response::One ? 1.0 : -1.0;
        const double v = eta_x * delta;
        sum += v;
        sum2 += v * v;
        sum3 += v * v * v;
        sum4 += v * v * v * v;
    }
    const double inv = 1.0 / static_cast<double>(mc_samples);
    const double mean = sum * inv;
    const double m2 = sum2 * inv - mean * mean;
    // central fourth moment, for the variance estimator's standard error
    const double m4 = sum4 * inv - 4.0 * mean * sum3 * inv + 6.0 * mean * mean * sum2 * inv -
                      3.0 * mean * mean * mean * mean;

    MarginStats st;
    st.x.assign(x.begin(), x.end());
    st.n = n;
    st.m_n = mean;
    st.sigma2_n = m2;
    st.m_n_se = std::sqrt(std::max(0.0, m2) * inv);
    st.sigma2_n_se = std::sqrt(std::max(0.0, m4 - m2 * m2) * inv);
    st.ball_mass = dist.ball_mass(x, r);
    st.eta_bar_n = dist.ball_eta_mean(x, r);
    st.m_n_closed = eta_x * st.eta_bar_n * st.ball_mass;
    const double mean_delta = st.eta_bar_n * st.ball_mass;
    st.sigma2_closed = eta_x * eta_x * (1.0 - mean_delta * mean_delta);
    return st;
}

struct BinomialReciprocalCheck {
    double lhs = 0.0;  // E{ 1/B * 1{B > 0} } by exact summation
    double rhs = 0.0;  // 2 / ((n+1) p)
    bool pass = false;
};

/// Exact check of the binomial reciprocal bound E{(1/B)1{B>0}} <= 2/((n+1)p).
inline BinomialReciprocalCheck binomial_reciprocal_check(long n, double p) {
    if (n < 1) throw UsageError("binomial_reciprocal_check: n >= 1");
    if (!(p > 0.0) || p > 1.0) throw UsageError("binomial_reciprocal_check: p in (0,1]");
    long double lhs = 0.0L;
    if (p == 1.0) {
        lhs = 1.0L / static_cast<long double>(n);
    } else {
        const long double lp = static_cast<long double>(p);
        const long double lq = 1.0L - lp;
        long double pmf = std::pow(lq, static_cast<long double>(n));  // P{B = 0}
        for (long k = 1; k <= n; ++k) {
            pmf *= lp / lq * static_cast<long double>(n - k + 1) / static_cast<long double>(k);
            lhs += pmf / static_cast<long double>(k);
        }
    }
    BinomialReciprocalCheck out;
    out.lhs = static_cast<double>(lhs);
    out.rhs = 2.0 / (static_cast<double>(n + 1) * p);
    out.pass = out.lhs <= out.rhs;
    return out;
}

}  // namespace bitfuse
