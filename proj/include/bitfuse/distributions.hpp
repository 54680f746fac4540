#pragma once

// Synthetic joint laws P_XY with exact oracle access to the regression
// function eta(x) = E{Y|X=x}, the Bayes classifier, and the minimal risk L*.
// Only families with a computable L* ship: discrete atom mixtures (exact
// enumeration) and 1-d uniform-marginal families with piecewise-linear eta
// (adaptive quadrature).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bitfuse/common.hpp"
#include "bitfuse/numeric.hpp"
#include "bitfuse/rng.hpp"

namespace bitfuse {

enum class LabelSpace { Binary01, BinaryPM, Real };

inline std::string to_string(LabelSpace s) {
    switch (s) {
        case LabelSpace::Binary01: return "binary01";
        case LabelSpace::BinaryPM: return "binary_pm";
        case LabelSpace::Real: return "real";
    }
    return "?";
}

/// Zero-mean noise law with finite variance, for the additive-noise family.
struct NoiseLaw {
    enum class Kind { Gaussian, UniformSym, TwoPoint };
    Kind kind = Kind::Gaussian;
    double param = 0.0;  // Gaussian: sigma^2; UniformSym: half-width; TwoPoint: magnitude

    double variance() const {
        switch (kind) {
            case Kind::Gaussian: return param;
            case Kind::UniformSym: return param * param / 3.0;
            case Kind::TwoPoint: return param * param;
        }
        return 0.0;
    }

    double sample(RngStream& rng) const {
        switch (kind) {
            case Kind::Gaussian: return std::sqrt(param) * rng.gaussian();
            case Kind::UniformSym: return rng.uniform(-param, param);
            case Kind::TwoPoint: return rng.bernoulli(0.5) ? param : -param;
        }
        return 0.0;
    }
};

struct LabelOutcome {
    double y = 0.0;
    double prob = 0.0;
};

struct Atom {
    std::vector<double> x;
    double mass = 0.0;
    std::vector<LabelOutcome> label_law;

    double label_mean() const {
        double m = 0.0;
        for (const auto& o : label_law) m += o.y * o.prob;
        return m;
    }
    double label_second_moment() const {
        double m = 0.0;
        for (const auto& o : label_law) m += o.y * o.y * o.prob;
        return m;
    }
    double label_variance() const {
        const double m = label_mean();
        return label_second_moment() - m * m;
    }
};

struct EtaKnot {
    double x = 0.0;
    double eta = 0.0;
};

// Identifies an RNG stream; training sets remember theirs so that repeated
// sampling is reproducible.
struct StreamId {
    uint64_t seed = 0;
    uint32_t trial = 0;
};

class TrainingSet {
public:
    TrainingSet(int dimension, StreamId stream) : d_(dimension), stream_(stream) {}

    void append(PointView x, double y) {
        if (static_cast<int>(x.size()) != d_) throw UsageError("example dimension mismatch");
        xs_.insert(xs_.end(), x.begin(), x.end());
        ys_.push_back(y);
    }

    long size() const { return static_cast<long>(ys_.size()); }
    int dimension() const { return d_; }
    PointView x(long i) const { return PointView(xs_.data() + i * d_, d_); }
    double y(long i) const { return ys_[static_cast<std::size_t>(i)]; }
    const std::vector<double>& labels() const { return ys_; }
    StreamId stream_key() const { return stream_; }

private:
    int d_;
    std::vector<double> xs_;
    std::vector<double> ys_;
    StreamId stream_;
};

class SyntheticDistribution {
public:
    enum class Family { DiscreteAtoms, PiecewiseLinearEta1D, RegressionAdditiveNoise1D };

    static SyntheticDistribution discrete_atoms(std::vector<Atom> atoms, LabelSpace labels) {
        SyntheticDistribution d;
        d.family_ = Family::DiscreteAtoms;
        d.label_space_ = labels;
        d.atoms_ = std::move(atoms);
        if (d.atoms_.empty()) throw ConfigError("discrete_atoms: no atoms");
        d.dim_ = static_cast<int>(d.atoms_.front().x.size());
        d.validate();
        return d;
    }

    static SyntheticDistribution piecewise_linear_eta(double lo, double hi,
                                                      std::vector<EtaKnot> knots,
                                                      LabelSpace labels) {
        if (labels == LabelSpace::Real)
            throw ConfigError("piecewise_linear_eta: label space must be binary");
        SyntheticDistribution d;
        d.family_ = Family::PiecewiseLinearEta1D;
        d.label_space_ = labels;
        d.lo_ = lo;
        d.hi_ = hi;
        d.knots_ = std::move(knots);
        d.dim_ = 1;
        d.validate();
        return d;
    }

    static SyntheticDistribution regression_additive_noise(double lo, double hi,
                                                           std::vector<EtaKnot> knots,
                                                           NoiseLaw noise) {
        SyntheticDistribution d;
        d.family_ = Family::RegressionAdditiveNoise1D;
        d.label_space_ = LabelSpace::Real;
        d.lo_ = lo;
        d.hi_ = hi;
        d.knots_ = std::move(knots);
        d.noise_ = noise;
        d.dim_ = 1;
        d.validate();
        return d;
    }

    Family family() const { return family_; }
    LabelSpace label_space() const { return label_space_; }
    int dimension() const { return dim_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<EtaKnot>& knots() const { return knots_; }
    double support_lo() const { return lo_; }
    double support_hi() const { return hi_; }
    const NoiseLaw& noise() const { return noise_; }

    /// eta(x) = E{Y|X=x}. Queries outside the support clamp to the nearest
    /// support point. For BinaryPM this equals P{+1|x} - P{-1|x}.
    double eta(PointView x) const {
        if (family_ == Family::DiscreteAtoms) return atoms_[nearest_atom(x)].label_mean();
        return eta_at(scalar(x));
    }

    /// Conditional second moment E{Y^2|X=x}.
    double second_moment(PointView x) const {
        switch (family_) {
            case Family::DiscreteAtoms: return atoms_[nearest_atom(x)].label_second_moment();
            case Family::PiecewiseLinearEta1D: {
                if (label_space_ == LabelSpace::BinaryPM) return 1.0;
                return eta_at(scalar(x));  // Y in {0,1}: Y^2 = Y
            }
            case Family::RegressionAdditiveNoise1D: {
                const double m = eta_at(scalar(x));
                return m * m + noise_.variance();
            }
        }
        return 0.0;
    }

    /// Probability mass of the closed ball B_r(x) under P_X.
    double ball_mass(PointView x, double r) const {
        if (family_ == Family::DiscreteAtoms) {
            double m = 0.0;
            for (const auto& a : atoms_)
                if (in_closed_ball(a.x, x, r)) m += a.mass;
            return m;
        }
        const double q = scalar(x);
        const double a = std::max(lo_, q - r);
        const double b = std::min(hi_, q + r);
        return b > a ? (b - a) / (hi_ - lo_) : 0.0;
    }

    /// E{eta(X) | X in B_r(x)}; 0 when the ball has no mass.
    double ball_eta_mean(PointView x, double r) const {
        if (family_ == Family::DiscreteAtoms) {
            double m = 0.0, num = 0.0;
            for (const auto& a : atoms_)
                if (in_closed_ball(a.x, x, r)) {
                    m += a.mass;
                    num += a.mass * a.label_mean();
                }
            return m > 0.0 ? num / m : 0.0;
        }
        const double q = scalar(x);
        const double a = std::max(lo_, q - r);
        const double b = std::min(hi_, q + r);
        if (b <= a) return 0.0;
        const double integral = integrate_over_knots(a, b, [this](double t) { return eta_at(t); });
        return integral / (b - a);
    }

    /// E{Y} under the joint law.
    double label_mean() const {
        if (family_ == Family::DiscreteAtoms) {
            double m = 0.0;
            for (const auto& a : atoms_) m += a.mass * a.label_mean();
            return m;
        }
        return integrate_over_knots(lo_, hi_, [this](double t) { return eta_at(t); }) /
               (hi_ - lo_);
    }

    /// E{Y^2} under the joint law.
    double label_second_moment() const {
        if (family_ == Family::DiscreteAtoms) {
            double m = 0.0;
            for (const auto& a : atoms_) m += a.mass * a.label_second_moment();
            return m;
        }
        if (label_space_ == LabelSpace::BinaryPM) return 1.0;
        if (label_space_ == LabelSpace::Binary01) return label_mean();
        const double eta2 =
            integrate_over_knots(lo_, hi_, [this](double t) {
                const double e = eta_at(t);
                return e * e;
            }) /
            (hi_ - lo_);
        return eta2 + noise_.variance();
    }

    void sample_pair(RngStream& rng, std::vector<double>& x_out, double& y_out) const {
        if (family_ == Family::DiscreteAtoms) {
            std::vector<double> masses;
            masses.reserve(atoms_.size());
            for (const auto& a : atoms_) masses.push_back(a.mass);
            const auto& atom = atoms_[rng.categorical(masses)];
            x_out.assign(atom.x.begin(), atom.x.end());
            std::vector<double> probs;
            probs.reserve(atom.label_law.size());
            for (const auto& o : atom.label_law) probs.push_back(o.prob);
            y_out = atom.label_law[rng.categorical(probs)].y;
            return;
        }
        const double x = rng.uniform(lo_, hi_);
        x_out.assign(1, x);
        const double e = eta_at(x);
        switch (label_space_) {
            case LabelSpace::Binary01: y_out = rng.bernoulli(e) ? 1.0 : 0.0; break;
            case LabelSpace::BinaryPM: y_out = rng.bernoulli(0.5 * (1.0 + e)) ? 1.0 : -1.0; break;
            case LabelSpace::Real: y_out = e + noise_.sample(rng); break;
        }
    }

private:
    friend double bayes_risk(const SyntheticDistribution&);

    double scalar(PointView x) const {
        if (x.size() != 1) throw UsageError("1-d family queried with d != 1");
        return std::clamp(x[0], lo_, hi_);
    }

    double eta_at(double x) const {
        x = std::clamp(x, knots_.front().x, knots_.back().x);
        auto it = std::upper_bound(knots_.begin(), knots_.end(), x,
                                   [](double v, const EtaKnot& k) { return v < k.x; });
        if (it == knots_.begin()) return knots_.front().eta;
        if (it == knots_.end()) return knots_.back().eta;
        const EtaKnot& hi = *it;
        const EtaKnot& lo = *(it - 1);
        const double t = (x - lo.x) / (hi.x - lo.x);
        return lo.eta + t * (hi.eta - lo.eta);
    }

    std::size_t nearest_atom(PointView x) const {
        std::size_t best = 0;
        double best_d = squared_distance(atoms_[0].x, x);
        for (std::size_t i = 1; i < atoms_.size(); ++i) {
            const double d = squared_distance(atoms_[i].x, x);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        return best;
    }

    // Integrate f over [a, b], splitting at knots so each panel is smooth.
    template <typename F>
    double integrate_over_knots(double a, double b, F f) const {
        double total = 0.0;
        double cur = a;
        for (const auto& k : knots_) {
            if (k.x <= cur) continue;
            if (k.x >= b) break;
            total += adaptive_simpson(f, cur, k.x, 1e-10);
            cur = k.x;
        }
        total += adaptive_simpson(f, cur, b, 1e-10);
        return total;
    }

    void validate() const {
        if (family_ == Family::DiscreteAtoms) {
            double total = 0.0;
            for (const auto& a : atoms_) {
                if (static_cast<int>(a.x.size()) != dim_)
                    throw ConfigError("atom dimension mismatch");
                if (a.mass < 0.0) throw ConfigError("negative atom mass");
                total += a.mass;
                double p = 0.0;
                for (const auto& o : a.label_law) {
                    if (o.prob < 0.0) throw ConfigError("negative label probability");
                    p += o.prob;
                    check_label(o.y);
                }
                if (std::abs(p - 1.0) > 1e-12)
                    throw ConfigError("label law of an atom does not sum to 1");
            }
            if (std::abs(total - 1.0) > 1e-12) throw ConfigError("atom masses do not sum to 1");
            return;
        }
        if (!(lo_ < hi_)) throw ConfigError("support interval is empty");
        if (knots_.size() < 2) throw ConfigError("need at least two eta knots");
        for (std::size_t i = 0; i < knots_.size(); ++i) {
            if (i > 0 && !(knots_[i].x > knots_[i - 1].x))
                throw ConfigError("eta knots must be strictly increasing in x");
            check_eta_range(knots_[i].eta);
        }
        if (knots_.front().x != lo_ || knots_.back().x != hi_)
            throw ConfigError("eta knots must cover the support interval");
        if (family_ == Family::RegressionAdditiveNoise1D && noise_.param < 0.0)
            throw ConfigError("noise parameter must be nonnegative");
    }

    void check_label(double y) const {
        if (label_space_ == LabelSpace::Binary01 && y != 0.0 && y != 1.0)
            throw ConfigError("binary01 label outside {0,1}");
        if (label_space_ == LabelSpace::BinaryPM && y != 1.0 && y != -1.0)
            throw ConfigError("binary_pm label outside {-1,+1}");
    }

    void check_eta_range(double e) const {
        if (label_space_ == LabelSpace::Binary01 && (e < 0.0 || e > 1.0))
            throw ConfigError("eta knot outside [0,1]");
        if (label_space_ == LabelSpace::BinaryPM && (e < -1.0 || e > 1.0))
            throw ConfigError("eta knot outside [-1,1]");
    }

    Family family_ = Family::DiscreteAtoms;
    LabelSpace label_space_ = LabelSpace::Binary01;
    int dim_ = 1;
    std::vector<Atom> atoms_;
    std::vector<EtaKnot> knots_;
    double lo_ = 0.0, hi_ = 1.0;
    NoiseLaw noise_{};
};

/// n i.i.d. draws from P_XY; deterministic given the stream key, and a
/// prefix of any longer draw from the same key.
inline TrainingSet sample_training(const SyntheticDistribution& dist, long n, StreamId stream) {
    if (n < 1) throw UsageError("sample_training: n must be >= 1");
    TrainingSet out(dist.dimension(), stream);
    std::vector<double> x;
    double y = 0.0;
    for (long i = 0; i < n; ++i) {
        RngStream rng(stream.seed, StreamDomain::Training, stream.trial,
                      static_cast<uint32_t>(i));
        dist.sample_pair(rng, x, y);
        out.append(x, y);
    }
    return out;
}

inline double regression_fn(const SyntheticDistribution& dist, PointView x) {
    return dist.eta(x);
}

/// MAP label: threshold eta at 1/2 (Binary01) or 0 (BinaryPM); ties go to
/// the positive label.
inline int bayes_classifier(const SyntheticDistribution& dist, PointView x) {
    const double e = dist.eta(x);
    switch (dist.label_space()) {
        case LabelSpace::Binary01: return e >= 0.5 ? 1 : 0;
        case LabelSpace::BinaryPM: return e >= 0.0 ? 1 : -1;
        case LabelSpace::Real: throw UsageError("bayes_classifier on a real label space");
    }
    return 0;
}

/// Minimal expected loss: 0-1 loss for binary label spaces, squared loss
/// (E{Var(Y|X)}) for real labels.
inline double bayes_risk(const SyntheticDistribution& dist) {
    using Family = SyntheticDistribution::Family;
    if (dist.family() == Family::DiscreteAtoms) {
        double total = 0.0;
        for (const auto& a : dist.atoms()) {
            if (dist.label_space() == LabelSpace::Real) {
                total += a.mass * a.label_variance();
            } else {
                // positive label is y = 1 in both binary encodings
                double p_pos = 0.0;
                for (const auto& o : a.label_law)
                    if (o.y == 1.0) p_pos += o.prob;
                total += a.mass * std::min(p_pos, 1.0 - p_pos);
            }
        }
        return total;
    }
    if (dist.family() == Family::RegressionAdditiveNoise1D) return dist.noise().variance();
    const double lo = dist.support_lo();
    const double hi = dist.support_hi();
    const bool pm = dist.label_space() == LabelSpace::BinaryPM;
    const auto integrand = [&](double t) {
        const double e = dist.eta(PointView(&t, 1));
        return pm ? 0.5 * (1.0 - std::abs(e)) : std::min(e, 1.0 - e);
    };
    return dist.integrate_over_knots(lo, hi, integrand) / (hi - lo);
}

}  // namespace bitfuse
