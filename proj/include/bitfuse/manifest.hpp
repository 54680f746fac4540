#pragma once

// Experiment manifests: one UTF-8 JSON file per experiment, the single
// source of truth for a run. No environment overrides, no wall-clock
// seeding; a manifest with the same bytes always describes the same run.

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bitfuse/agents.hpp"
#include "bitfuse/common.hpp"
#include "bitfuse/counterexample.hpp"
#include "bitfuse/distributions.hpp"
#include "bitfuse/ensemble.hpp"

namespace bitfuse {

inline uint64_t fnv1a64(const std::string& bytes) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

struct ExperimentManifest {
    std::string name;
    std::string model_name;
    std::optional<ModelKind> model;

    std::optional<SyntheticDistribution> distribution;
    std::string distribution_error;

    std::optional<RateSchedule> schedule;
    std::string schedule_error;

    std::vector<long> n_list;
    long trials = 0;
    long queries = 0;
    std::optional<uint64_t> seed;
    std::string output;
    std::string expectation = "convergent";  // or "nonconvergent"
    double gap_tolerance = 0.05;
    bool allow_invalid_schedule = false;

    std::optional<CounterexampleInstance> counterexample;
    std::string counterexample_error;

    uint64_t hash = 0;
    std::string source_path;
};

namespace detail {

inline std::optional<ModelKind> model_from_name(const std::string& s) {
    if (s == "classify_with_abstention") return ModelKind::ClassifyWithAbstention;
    if (s == "classify_no_abstention") return ModelKind::ClassifyNoAbstention;
    if (s == "regress_with_abstention") return ModelKind::RegressWithAbstention;
    if (s == "regress_no_abstention") return ModelKind::RegressNoAbstention;
    return std::nullopt;
}

inline LabelSpace label_space_from_name(const std::string& s) {
    if (s == "binary01") return LabelSpace::Binary01;
    if (s == "binary_pm") return LabelSpace::BinaryPM;
    if (s == "real") return LabelSpace::Real;
    throw ConfigError("unknown label space: " + s);
}

inline std::vector<EtaKnot> knots_from_json(const nlohmann::json& j) {
    std::vector<EtaKnot> knots;
    for (const auto& k : j) knots.push_back({k.at(0).get<double>(), k.at(1).get<double>()});
    return knots;
}

inline SyntheticDistribution distribution_from_json(const nlohmann::json& j) {
    const std::string family = j.at("family").get<std::string>();
    if (family == "discrete_atoms") {
        std::vector<Atom> atoms;
        for (const auto& a : j.at("atoms")) {
            Atom atom;
            atom.x = a.at("x").get<std::vector<double>>();
            atom.mass = a.at("mass").get<double>();
            for (const auto& l : a.at("labels"))
                atom.label_law.push_back({l.at(0).get<double>(), l.at(1).get<double>()});
            atoms.push_back(std::move(atom));
        }
        return SyntheticDistribution::discrete_atoms(
            std::move(atoms), label_space_from_name(j.at("labels").get<std::string>()));
    }
    if (family == "piecewise_linear_eta_1d") {
        const auto support = j.at("support");
        return SyntheticDistribution::piecewise_linear_eta(
            support.at(0).get<double>(), support.at(1).get<double>(),
            knots_from_json(j.at("eta_knots")),
            label_space_from_name(j.at("labels").get<std::string>()));
    }
    if (family == "regression_additive_noise_1d") {
        const auto support = j.at("support");
        const auto& nj = j.at("noise");
        const std::string kind = nj.at("kind").get<std::string>();
        NoiseLaw noise;
        if (kind == "gaussian") {
            noise = {NoiseLaw::Kind::Gaussian, nj.at("sigma2").get<double>()};
        } else if (kind == "uniform") {
            noise = {NoiseLaw::Kind::UniformSym, nj.at("half_width").get<double>()};
        } else if (kind == "two_point") {
            noise = {NoiseLaw::Kind::TwoPoint, nj.at("magnitude").get<double>()};
        } else {
            throw ConfigError("unknown noise kind: " + kind);
        }
        return SyntheticDistribution::regression_additive_noise(
            support.at(0).get<double>(), support.at(1).get<double>(),
            knots_from_json(j.at("eta_knots")), noise);
    }
    throw ConfigError("unknown distribution family: " + family);
}

inline CounterexampleInstance counterexample_from_json(const nlohmann::json& j) {
    const auto& d = j.at("delta");
    DeltaTable table;
    table.at_x0_y0 = d.at("x0_y0").get<double>();
    table.at_x1_y1 = d.at("x1_y1").get<double>();
    table.at_x0_y1 = d.at("x0_y1").get<double>();
    table.at_x1_y0 = d.at("x1_y0").get<double>();
    return CounterexampleInstance::make(
        j.at("x0").get<std::vector<double>>(), j.at("x1").get<std::vector<double>>(),
        j.at("y0").get<double>(), j.at("y1").get<double>(), j.at("q").get<double>(), table);
}

}  // namespace detail

/// Parses a manifest file. Malformed JSON or wrongly-typed fields raise
/// ParseError; content problems (unknown names, infeasible blocks, bad
/// schedules) are recorded on the manifest for validate() to report.
inline ExperimentManifest load_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open manifest: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string bytes = buf.str();

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("manifest " + path + ": " + e.what());
    }

    ExperimentManifest m;
    m.hash = fnv1a64(bytes);
    m.source_path = path;
    try {
        m.name = j.value("name", std::string("experiment"));
        m.model_name = j.value("model", std::string());
        m.model = detail::model_from_name(m.model_name);
        if (j.contains("distribution")) {
            try {
                m.distribution = detail::distribution_from_json(j.at("distribution"));
            } catch (const ConfigError& e) {
                m.distribution_error = e.what();
            }
        }
        if (j.contains("schedule")) {
            const auto& s = j.at("schedule");
            try {
                m.schedule = RateSchedule(s.value("r0", 0.5), s.value("beta", 0.25),
                                          s.value("c0", 1.0), s.value("gamma", 0.0));
            } catch (const ConfigError& e) {
                m.schedule_error = e.what();
            }
        }
        if (j.contains("n_list")) m.n_list = j.at("n_list").get<std::vector<long>>();
        m.trials = j.value("trials", 20L);
        m.queries = j.value("queries", 500L);
        if (j.contains("seed")) m.seed = j.at("seed").get<uint64_t>();
        m.output = j.value("output", m.name + ".csv");
        m.expectation = j.value("expectation", std::string("convergent"));
        m.gap_tolerance = j.value("gap_tolerance", 0.05);
        m.allow_invalid_schedule = j.value("allow_invalid_schedule", false);
        if (j.contains("counterexample")) {
            try {
                m.counterexample = detail::counterexample_from_json(j.at("counterexample"));
            } catch (const ConfigError& e) {
                m.counterexample_error = e.what();
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("manifest " + path + ": " + e.what());
    }
    return m;
}

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
    std::string to_string() const {
        if (ok()) return "";
        std::string s;
        for (const auto& v : violations) s += v + "\n";
        return s;
    }
};

/// Lists every violated manifest constraint; an empty report means runnable.
inline ValidationReport validate(const ExperimentManifest& m) {
    ValidationReport report;
    auto bad = [&](const std::string& s) { report.violations.push_back(s); };

    if (!m.model) bad("unknown model: \"" + m.model_name + "\"");
    if (!m.seed) bad("missing seed (wall-clock seeding is not supported)");
    if (m.expectation != "convergent" && m.expectation != "nonconvergent")
        bad("expectation must be \"convergent\" or \"nonconvergent\"");

    const bool witness = m.model && *m.model == ModelKind::RegressNoAbstention;
    if (witness) {
        if (!m.counterexample_error.empty()) bad(m.counterexample_error);
        else if (!m.counterexample)
            bad("regress_no_abstention requires a counterexample block");
    } else if (m.model) {
        if (!m.distribution_error.empty()) bad(m.distribution_error);
        else if (!m.distribution)
            bad("missing distribution block");
        if (!m.schedule_error.empty()) bad(m.schedule_error);
        else if (!m.schedule)
            bad("missing schedule block");
        if (m.distribution &&
            m.distribution->label_space() != required_label_space(*m.model))
            bad("distribution label space " + to_string(m.distribution->label_space()) +
                " incompatible with model " + m.model_name);
        if (m.schedule && !m.allow_invalid_schedule) {
            const auto check = schedule_check(*m.schedule, theorem_for(*m.model),
                                              m.distribution ? m.distribution->dimension() : 1);
            for (const auto& failure : check.failures())
                bad("schedule violates: " + failure +
                    " (set allow_invalid_schedule to run anyway)");
        }
        if (m.queries < 1) bad("queries must be >= 1");
    }

    if (m.n_list.empty()) bad("n_list must be nonempty");
    for (std::size_t i = 0; i < m.n_list.size(); ++i) {
        if (m.n_list[i] < 1) {
            bad("n_list entries must be >= 1");
            break;
        }
        if (i > 0 && m.n_list[i] <= m.n_list[i - 1]) {
            bad("n_list must be strictly increasing");
            break;
        }
    }
    if (m.trials < 1) bad("trials must be >= 1");
    if (m.output.empty()) bad("output path must be nonempty");
    return report;
}

}  // namespace bitfuse
