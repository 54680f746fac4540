#pragma once

// Executes validated manifests: runs the sweep (or the counterexample
// witness), writes plot-ready CSV plus a human-readable summary. CSV output
// is locale-independent and byte-stable: doubles are printed with
// std::to_chars shortest round-trip form, columns are fixed, comment lines
// are prefixed with '#'.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bitfuse/counterexample.hpp"
#include "bitfuse/ensemble.hpp"
#include "bitfuse/manifest.hpp"

namespace bitfuse {

inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ParseError("bad numeric field: \"" + s + "\"");
    return v;
}

struct RunOptions {
    int threads = 0;  // 0 = hardware concurrency; never affects results
    std::string output_dir = ".";
};

struct RunResult {
    std::string csv_path;
    std::string summary_path;
    std::string summary_text;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

struct CsvFile {
    std::map<std::string, std::string> meta;  // from "# key=value" comments
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline CsvFile read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open CSV: " + path);
    CsvFile csv;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto body = line.substr(1);
            const auto eq = body.find('=');
            if (eq != std::string::npos) {
                auto key = body.substr(0, eq);
                key.erase(0, key.find_first_not_of(' '));
                csv.meta[key] = body.substr(eq + 1);
            }
            continue;
        }
        auto fields = split_csv_line(line);
        if (csv.header.empty())
            csv.header = std::move(fields);
        else
            csv.rows.push_back(std::move(fields));
    }
    if (csv.header.empty()) throw ParseError("CSV has no header: " + path);
    return csv;
}

inline std::size_t column(const CsvFile& csv, const std::string& name) {
    for (std::size_t i = 0; i < csv.header.size(); ++i)
        if (csv.header[i] == name) return i;
    throw ParseError("CSV missing column \"" + name + "\"");
}

inline std::string trend_of(const std::vector<double>& gaps, const std::vector<double>& ses) {
    if (gaps.size() < 2) return "flat";
    bool strictly_decreasing = true;
    for (std::size_t i = 1; i < gaps.size(); ++i)
        if (!(gaps[i] < gaps[i - 1])) strictly_decreasing = false;
    if (strictly_decreasing) return "decreasing";
    const double theta =
        4.0 * std::sqrt(ses.front() * ses.front() + ses.back() * ses.back());
    if (gaps.back() > gaps.front() + theta) return "increasing";
    return "flat";
}

}  // namespace detail

/// Reads a results CSV and renders the per-n gap table with a PASS/FAIL
/// verdict against the tolerance and expectation recorded in the file.
inline std::string summarize(const std::string& csv_path) {
    const detail::CsvFile csv = detail::read_csv(csv_path);
    std::ostringstream out;
    const auto meta = [&](const std::string& key, const std::string& fallback) {
        const auto it = csv.meta.find(key);
        return it == csv.meta.end() ? fallback : it->second;
    };
    out << "experiment: " << meta("name", "?") << "\n";

    if (csv.header.front() == "rule") {
        // counterexample gap table
        const std::size_t c_rule = detail::column(csv, "rule");
        const std::size_t c_n = detail::column(csv, "n");
        const std::size_t c_max = detail::column(csv, "max_gap");
        const double irreducibility = parse_double(meta("irreducibility", "0"));
        out << "kind: counterexample\n";
        out << "irreducibility: " << format_double(irreducibility) << "\n";
        std::map<std::string, std::vector<std::pair<long, double>>> by_rule;
        for (const auto& row : csv.rows)
            by_rule[row[c_rule]].push_back(
                {static_cast<long>(parse_double(row[c_n])), parse_double(row[c_max])});
        bool pass = !csv.rows.empty();
        for (const auto& [rule, seq] : by_rule) {
            const double first = seq.front().second;
            bool rule_ok = true;
            for (const auto& [n, gap] : seq) {
                out << "rule=" << rule << " n=" << n << " max_gap=" << format_double(gap)
                    << "\n";
                if (gap < irreducibility || gap < 0.8 * first) rule_ok = false;
            }
            out << "rule=" << rule << " persists: " << (rule_ok ? "yes" : "no") << "\n";
            pass = pass && rule_ok;
        }
        out << "witness: " << (pass ? "PASS" : "FAIL") << "\n";
        return out.str();
    }

    const std::size_t c_n = detail::column(csv, "n");
    const std::size_t c_gap = detail::column(csv, "gap");
    const std::size_t c_se = detail::column(csv, "std_error");
    if (csv.rows.empty()) throw ParseError("CSV has no data rows: " + csv_path);
    std::vector<double> gaps, ses;
    for (const auto& row : csv.rows) {
        out << "n=" << row[c_n] << " gap=" << row[c_gap] << " std_error=" << row[c_se]
            << "\n";
        gaps.push_back(parse_double(row[c_gap]));
        ses.push_back(parse_double(row[c_se]));
    }
    out << "gap_first: " << format_double(gaps.front()) << "\n";
    out << "gap_last: " << format_double(gaps.back()) << "\n";
    const std::string trend = detail::trend_of(gaps, ses);
    const std::string expectation = meta("expectation", "convergent");
    const double tolerance = parse_double(meta("gap_tolerance", "0.05"));
    std::string verdict;
    if (expectation == "nonconvergent")
        verdict = trend != "decreasing" ? "expected-fail PASS" : "FAIL";
    else
        verdict = (trend == "decreasing" && gaps.back() <= tolerance) ? "PASS" : "FAIL";
    out << "trend: " << trend << ", " << verdict << "\n";
    return out.str();
}

/// Runs a validated manifest: writes the results CSV (and, for provenance,
/// the manifest hash in a comment line), derives the summary by re-reading
/// the CSV, writes it next to the CSV, and returns both paths.
inline RunResult run(const ExperimentManifest& m, RunOptions opt = {}) {
    const ValidationReport report = validate(m);
    if (!report.ok())
        throw ConfigError("manifest failed validation:\n" + report.to_string());

    namespace fs = std::filesystem;
    const fs::path csv_path = fs::path(opt.output_dir) / m.output;
    std::error_code ec;
    if (csv_path.has_parent_path()) fs::create_directories(csv_path.parent_path(), ec);

    std::ostringstream body;
    body << "# name=" << m.name << "\n";
    body << "# model=" << m.model_name << "\n";
    {
        std::ostringstream hash;
        hash << std::hex << m.hash;
        body << "# manifest_fnv1a64=" << hash.str() << "\n";
    }
    body << "# seed=" << *m.seed << "\n";

    if (*m.model == ModelKind::RegressNoAbstention) {
        const auto& inst = *m.counterexample;
        const GapTable table = inconsistency_report(inst, default_transfer_family(inst),
                                                    m.n_list, m.trials, *m.seed);
        body << "# irreducibility=" << format_double(table.irreducibility) << "\n";
        body << "# exact_match_diff="
             << format_double(verify_match(inst, 1, MatchCheck::Exact)) << "\n";
        body << "rule,n,gap_P,gap_Pprime,max_gap\n";
        for (const auto& row : table.rows)
            body << row.rule << "," << row.n << "," << format_double(row.gap_p) << ","
                 << format_double(row.gap_pprime) << "," << format_double(row.max_gap)
                 << "\n";
    } else {
        body << "# expectation=" << m.expectation << "\n";
        body << "# gap_tolerance=" << format_double(m.gap_tolerance) << "\n";
        EnsembleOptions eopt;
        eopt.threads = opt.threads;
        const auto estimates = convergence_sweep(*m.model, *m.distribution, *m.schedule,
                                                 m.n_list, m.trials, m.queries, *m.seed, eopt);
        body << "n,mean_risk,std_error,bayes_risk,gap,trials,queries,seed\n";
        for (const auto& est : estimates)
            body << est.n << "," << format_double(est.mean_risk) << ","
                 << format_double(est.std_error) << "," << format_double(est.bayes_risk)
                 << "," << format_double(est.gap) << "," << est.trials << "," << est.queries
                 << "," << *m.seed << "\n";
    }

    {
        std::ofstream out(csv_path, std::ios::binary);
        if (!out) throw IoError("cannot write CSV: " + csv_path.string());
        out << body.str();
        if (!out) throw IoError("failed writing CSV: " + csv_path.string());
    }

    RunResult result;
    result.csv_path = csv_path.string();
    result.summary_text = summarize(result.csv_path);
    fs::path summary_path = csv_path;
    summary_path.replace_extension(".summary.txt");
    {
        std::ofstream out(summary_path, std::ios::binary);
        if (!out) throw IoError("cannot write summary: " + summary_path.string());
        out << result.summary_text;
    }
    result.summary_path = summary_path.string();
    return result;
}

}  // namespace bitfuse
