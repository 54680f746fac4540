// bitfuse command line: validate experiment manifests, run them to CSV,
// summarize result files.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bitfuse/manifest.hpp"
#include "bitfuse/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"bitfuse - distributed one-bit learning simulation lab"};
    app.require_subcommand(1);

    std::string manifest_path;
    std::string csv_path;
    int threads = 0;
    std::string output_dir = ".";

    auto* validate_cmd = app.add_subcommand("validate", "check a manifest against all constraints");
    validate_cmd->add_option("manifest", manifest_path, "manifest JSON file")->required();

    auto* run_cmd = app.add_subcommand("run", "run a manifest, write CSV and summary");
    run_cmd->add_option("manifest", manifest_path, "manifest JSON file")->required();
    run_cmd->add_option("--threads", threads,
                        "worker threads (default: hardware count; never affects results)");
    run_cmd->add_option("--output-dir", output_dir, "directory for CSV/summary output");

    auto* summarize_cmd = app.add_subcommand("summarize", "render a results CSV as a table");
    summarize_cmd->add_option("csv", csv_path, "results CSV file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate_cmd->parsed()) {
            const auto manifest = bitfuse::load_manifest(manifest_path);
            const auto report = bitfuse::validate(manifest);
            if (!report.ok()) {
                std::cerr << report.to_string();
                return 1;
            }
            return 0;
        }
        if (run_cmd->parsed()) {
            const auto manifest = bitfuse::load_manifest(manifest_path);
            bitfuse::RunOptions opt;
            opt.threads = threads;
            opt.output_dir = output_dir;
            const auto result = bitfuse::run(manifest, opt);
            std::cout << result.summary_text;
            std::cout << "csv: " << result.csv_path << "\n";
            std::cout << "summary: " << result.summary_path << "\n";
            return 0;
        }
        if (summarize_cmd->parsed()) {
            std::cout << bitfuse::summarize(csv_path);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
