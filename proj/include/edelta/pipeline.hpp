#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "edelta/report.hpp"
#include "edelta/simlab.hpp"

namespace edelta {

// A module error annotated with the pipeline stage it came from.
struct StageError : Error {
    std::string stage;

    StageError(std::string stage_name, const std::string& msg)
        : Error("[" + stage_name + "] " + msg), stage(std::move(stage_name)) {}
};

struct PipelineConfig {
    std::filesystem::path workspace_v1;
    std::filesystem::path workspace_v2;
    std::string diff_source; // file path, or "-" for stdin
    std::filesystem::path coverage_v1;
    std::filesystem::path coverage_v2;
    std::string test_command; // {test_id} placeholder
    ProbeConfig probe;
    int repetitions = 10;
    int warmup_runs = 2;
    int settle_ms = 500;
    Interleaving interleaving = Interleaving::AlternatingPairs;
    std::vector<std::string> tests_glob;
    MetricKind verdict_metric = MetricKind::EnergyPkg;
    double threshold = 0.0;
    std::optional<double> relative_threshold; // delta_omega / sum|Omega| gate
    bool require_conclusive = true;
    Aggregator aggregator = Aggregator::Median;
    double cv_threshold = 0.05;
    double qcd_threshold = 0.05;
    std::filesystem::path output; // report path; empty = stdout only
    bool all_tests = false;       // measure the full coverage-known suite

    static PipelineConfig from_json(const json& j);
    json to_json() const;
    void validate() const;
};

// The four-step flow: select -> measure -> delta -> verdict, plus
// localization when the commit is tagged breaking. Writes the report when
// config.output is set. Exit codes: 0 not-breaking, 1 breaking,
// 2 inconclusive/no-covering-tests; operational errors raise StageError.
DeltaReport run_pipeline(const PipelineConfig& config,
                         std::optional<std::string> diff_text = std::nullopt);

// Analysis starting from an existing measurement log (the `delta`
// subcommand): no subprocess execution.
DeltaReport analyze_log(const PipelineConfig& config, const MeasurementLog& log,
                        const ChangeSet& change, const TestSelection& selection);

struct HistoryOptions {
    std::filesystem::path repo;
    std::filesystem::path commits_file;    // "<rev1> <rev2>" per line, '#' comments
    std::filesystem::path config_template; // PipelineConfig JSON; {rev1} {rev2} {repo}
                                           // {index} substituted per pair; optional
                                           // top-level "prepare_cmd"
    std::filesystem::path out_csv;         // empty = return only
};

// Per-commit rows: selected-test count, delta_omega per metric, verdict,
// conclusiveness. Failing commits get an error cell; the scan continues.
std::string history_scan(const HistoryOptions& options);

} // namespace edelta
