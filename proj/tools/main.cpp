#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>

#include "edelta/mutator.hpp"
#include "edelta/pipeline.hpp"

using namespace edelta;

namespace {

std::string read_stdin() {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty() || out_path == "-")
        std::cout << text;
    else
        write_text_file(out_path, text);
}

// Probe flags shared by the measuring subcommands.
struct ProbeCli {
    std::vector<std::string> metrics;
    std::string powercap_root;
    std::string perf_adapter;
    std::string perf_cmd;
    std::string simulated;

    void attach(CLI::App* cmd) {
        cmd->add_option("--metrics", metrics,
                        "Enabled metrics (energy_pkg_uj, energy_dram_uj, duration_s, "
                        "instructions, cycles, cache_references, cache_misses, branches, "
                        "branch_misses)")
            ->delimiter(',');
        cmd->add_option("--powercap-root", powercap_root,
                        "Powercap directory (default /sys/class/powercap)");
        cmd->add_option("--perf-adapter", perf_adapter, "Counter adapter: os, cmd or off");
        cmd->add_option("--perf-cmd", perf_cmd,
                        "External perf command template with {events} {output} {cmd}");
        cmd->add_option("--simulated", simulated, "Simulated probe spec JSON file");
    }

    void apply(ProbeConfig& config) const {
        if (!metrics.empty()) {
            config.enabled_metrics.clear();
            for (const std::string& name : metrics) {
                auto metric = metric_from_name(name);
                if (!metric)
                    throw Error("unknown metric: " + name);
                config.enabled_metrics.insert(*metric);
            }
        }
        if (!powercap_root.empty())
            config.powercap_root = powercap_root;
        if (!perf_adapter.empty())
            config.perf_adapter = perf_adapter_from_string(perf_adapter);
        if (!perf_cmd.empty())
            config.perf_command = perf_cmd;
        if (!simulated.empty())
            config.simulated = SimulatedProbeSpec::load(simulated);
    }
};

int cmd_select(const std::string& diff_path, const std::string& cov1, const std::string& cov2,
               const std::vector<std::string>& globs, const std::string& out) {
    const std::string diff_text = diff_path == "-" ? read_stdin() : read_text_file(diff_path);
    const ChangeSet change = parse_unified_diff(diff_text);
    const CoverageMap cov_v1 = load_coverage(cov1);
    const CoverageMap cov_v2 = load_coverage(cov2);
    const TestSelection selection =
        select_tests(change, cov_v1, cov_v2, match_test_files(change.touched_files, globs));
    for (const std::string& w : change.warnings)
        std::cerr << "warning: " << w << "\n";
    emit(canonical_dump(selection_to_json(selection)), out);
    return 0;
}

struct RunCli {
    std::string config_path;
    std::string workspace_v1, workspace_v2;
    std::string diff_path;
    std::string cov1, cov2;
    std::string cmd;
    int reps = -1;
    int warmup = -1;
    int settle_ms = -1;
    std::string interleave;
    std::vector<std::string> globs;
    std::string verdict_metric;
    double threshold = std::numeric_limits<double>::quiet_NaN();
    double relative_threshold = std::numeric_limits<double>::quiet_NaN();
    double cv_threshold = std::numeric_limits<double>::quiet_NaN();
    double qcd_threshold = std::numeric_limits<double>::quiet_NaN();
    bool no_conclusiveness = false;
    std::string aggregator;
    std::string out;
    bool all_tests = false;
    bool table = false;
    ProbeCli probe;

    void attach(CLI::App* sub, bool with_execution) {
        sub->add_option("--config", config_path, "Pipeline config JSON; flags override");
        sub->add_option("--diff", diff_path, "Unified diff path, or - for stdin");
        sub->add_option("--cov-v1", cov1, "v1 coverage JSON");
        sub->add_option("--cov-v2", cov2, "v2 coverage JSON");
        sub->add_option("--tests-glob", globs, "Glob(s) naming test files in the diff")
            ->delimiter(',');
        sub->add_option("--verdict-metric", verdict_metric, "Metric driving the verdict");
        sub->add_option("--threshold", threshold, "delta_omega breaking threshold");
        sub->add_option("--relative-threshold", relative_threshold,
                        "Additional delta_omega / sum|Omega| gate");
        sub->add_option("--cv-threshold", cv_threshold, "CV stability gate (default 0.05)");
        sub->add_option("--qcd-threshold", qcd_threshold, "QCD stability gate (default 0.05)");
        sub->add_flag("--no-conclusiveness", no_conclusiveness,
                      "Skip the range-intersection gate");
        sub->add_option("--aggregator", aggregator, "median or mean");
        sub->add_option("-o,--out", out, "Report output path");
        sub->add_flag("--table", table, "Print a human-readable table");
        if (with_execution) {
            sub->add_option("--workspace-v1", workspace_v1, "Checkout of the pre-change version");
            sub->add_option("--workspace-v2", workspace_v2, "Checkout of the post-change version");
            sub->add_option("--cmd", cmd, "Test command template with {test_id}");
            sub->add_option("--reps", reps, "Measured repetitions per test and version");
            sub->add_option("--warmup", warmup, "Discarded warmup runs per test and version");
            sub->add_option("--settle-ms", settle_ms, "Delay between measured executions");
            sub->add_option("--interleave", interleave, "alternating or block");
            sub->add_flag("--all-tests", all_tests, "Measure every coverage-known test");
            probe.attach(sub);
        }
    }

    PipelineConfig build() const {
        PipelineConfig config;
        if (!config_path.empty())
            config = PipelineConfig::from_json(json::parse(read_text_file(config_path)));
        if (!workspace_v1.empty())
            config.workspace_v1 = workspace_v1;
        if (!workspace_v2.empty())
            config.workspace_v2 = workspace_v2;
        if (!diff_path.empty())
            config.diff_source = diff_path;
        if (!cov1.empty())
            config.coverage_v1 = cov1;
        if (!cov2.empty())
            config.coverage_v2 = cov2;
        if (!cmd.empty())
            config.test_command = cmd;
        if (reps >= 0)
            config.repetitions = reps;
        if (warmup >= 0)
            config.warmup_runs = warmup;
        if (settle_ms >= 0)
            config.settle_ms = settle_ms;
        if (!interleave.empty())
            config.interleaving = interleaving_from_string(interleave);
        if (!globs.empty())
            config.tests_glob = globs;
        if (!verdict_metric.empty()) {
            auto metric = metric_from_name(verdict_metric);
            if (!metric)
                throw Error("unknown metric: " + verdict_metric);
            config.verdict_metric = *metric;
        }
        if (!std::isnan(threshold))
            config.threshold = threshold;
        if (!std::isnan(relative_threshold))
            config.relative_threshold = relative_threshold;
        if (!std::isnan(cv_threshold))
            config.cv_threshold = cv_threshold;
        if (!std::isnan(qcd_threshold))
            config.qcd_threshold = qcd_threshold;
        if (no_conclusiveness)
            config.require_conclusive = false;
        if (!aggregator.empty())
            config.aggregator = aggregator_from_string(aggregator);
        if (!out.empty())
            config.output = out;
        if (all_tests)
            config.all_tests = true;
        probe.apply(config.probe);
        return config;
    }
};

int finish_report(const DeltaReport& report, const PipelineConfig& config, bool table) {
    if (table)
        std::cout << render_table(report);
    else if (config.output.empty())
        std::cout << canonical_dump(report_to_json(report));
    return report.exit_code();
}

int cmd_run(const RunCli& cli) {
    const PipelineConfig config = cli.build();
    std::optional<std::string> diff_text;
    if (config.diff_source == "-")
        diff_text = read_stdin();
    const DeltaReport report = run_pipeline(config, diff_text);
    return finish_report(report, config, cli.table);
}

int cmd_delta(const RunCli& cli, const std::string& log_path) {
    PipelineConfig config = cli.build();
    const MeasurementLog log = load_log(log_path);
    const std::string diff_text =
        config.diff_source == "-" ? read_stdin() : read_text_file(config.diff_source);
    const ChangeSet change = parse_unified_diff(diff_text);
    const CoverageMap cov_v1 = load_coverage(config.coverage_v1);
    const CoverageMap cov_v2 = load_coverage(config.coverage_v2);
    const TestSelection selection = select_tests(
        change, cov_v1, cov_v2, match_test_files(change.touched_files, config.tests_glob));
    const DeltaReport report = analyze_log(config, log, change, selection);
    if (!config.output.empty())
        save_report(report, config.output);
    return finish_report(report, config, cli.table);
}

int cmd_measure(const RunCli& cli, const std::vector<std::string>& tests,
                const std::string& selection_path, const std::string& out) {
    const PipelineConfig config = cli.build();

    RunPlan plan;
    if (!selection_path.empty()) {
        const TestSelection sel =
            selection_from_json(json::parse(read_text_file(selection_path)));
        plan.tests.assign(sel.selected.begin(), sel.selected.end());
    }
    for (const std::string& t : tests)
        plan.tests.push_back(t);
    plan.repetitions = config.repetitions;
    plan.workspaces[Version::V1] = config.workspace_v1;
    plan.workspaces[Version::V2] = config.workspace_v2;
    plan.test_command_template = config.test_command;
    plan.warmup_runs = config.warmup_runs;
    plan.interleaving = config.interleaving;
    plan.settle_ms = config.settle_ms;

    const MeasurementLog log = execute_plan(plan, config.probe);
    emit(log_to_jsonl(log), out);
    return 0;
}

int cmd_localize(const std::string& report_path, const std::string& cov1, const std::string& cov2,
                 const std::string& metric_name_arg, const std::string& out, bool table) {
    DeltaReport report = load_report(report_path);
    const CoverageMap cov_v1 = load_coverage(cov1);
    const CoverageMap cov_v2 = load_coverage(cov2);

    MetricKind metric = report.verdict_metric;
    if (!metric_name_arg.empty()) {
        auto m = metric_from_name(metric_name_arg);
        if (!m)
            throw Error("unknown metric: " + metric_name_arg);
        metric = *m;
    }
    auto mr = report.metrics.find(metric);
    if (mr == report.metrics.end())
        throw Error(std::string("report has no data for metric ") + metric_name(metric));

    // The changed lines live in the report's weights.
    ChangeSet change;
    for (const LineWeight& w : report.weights) {
        (w.line.version == Version::V1 ? change.deletions : change.additions).insert(w.line);
        change.touched_files.insert(w.line.file);
    }

    std::map<TestId, double> deltas;
    for (const auto& [test, d] : mr->second.tests)
        deltas[test] = d.delta;
    const auto [failing, passing] = partition_tests(deltas);
    report.ranking = tarantula_scores(build_spectrum(change, failing, passing, cov_v1, cov_v2));

    if (table) {
        int rank = 1;
        for (const RankedLine& e : report.ranking.entries)
            std::cout << rank++ << ". " << e.score << "  " << e.line.file << ":" << e.line.line
                      << " @" << to_string(e.line.version) << "\n";
    }
    if (!out.empty())
        save_report(report, out);
    else if (!table)
        std::cout << canonical_dump(ranking_to_json(report.ranking));
    return 0;
}

int cmd_burn(std::int64_t payload_uj, std::uint64_t seed, bool wallclock, const ProbeCli& probe_cli) {
    ProbeConfig config;
    probe_cli.apply(config);
    std::uint64_t rng_seed = seed;
    if (wallclock)
        rng_seed = static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::microseconds>(
                std::chrono::system_clock::now().time_since_epoch())
                .count());

    ProbeSession session = start_probe(config, MeasureContext{"burn", Version::V1, 0});
    const BurnResult result = consume_energy(session, payload_uj, rng_seed);
    session.stop();
    json j = result.to_json();
    j["probe_id"] = session.probe_id();
    std::cout << canonical_dump(j);
    return 0;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out) {
    const json scenario = json::parse(read_text_file(scenario_path));
    emit(canonical_dump(run_scenario(scenario)), out);
    return 0;
}

int cmd_sweep(const std::string& scenario_path, const std::vector<double>& payloads, int runs,
              const std::string& out) {
    const json scenario = json::parse(read_text_file(scenario_path));
    emit(run_sweep(scenario, payloads, runs), out);
    return 0;
}

int cmd_history(const std::string& repo, const std::string& commits, const std::string& tmpl,
                const std::string& out) {
    HistoryOptions options;
    options.repo = repo;
    options.commits_file = commits;
    options.config_template = tmpl;
    if (!out.empty() && out != "-")
        options.out_csv = out;
    const std::string csv = history_scan(options);
    if (options.out_csv.empty())
        std::cout << csv;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy regression testing from developers' tests"};
    app.require_subcommand(1);
    int exit_code = 0;

    // select
    {
        auto* sub = app.add_subcommand("select", "Select the tests covering a diff");
        auto diff = std::make_shared<std::string>("-");
        auto cov1 = std::make_shared<std::string>();
        auto cov2 = std::make_shared<std::string>();
        auto globs = std::make_shared<std::vector<std::string>>();
        auto out = std::make_shared<std::string>();
        sub->add_option("--diff", *diff, "Unified diff path, or - for stdin");
        sub->add_option("--cov-v1", *cov1, "v1 coverage JSON")->required();
        sub->add_option("--cov-v2", *cov2, "v2 coverage JSON")->required();
        sub->add_option("--tests-glob", *globs, "Glob(s) naming test files")->delimiter(',');
        sub->add_option("-o,--out", *out, "Selection output path");
        sub->callback(
            [=, &exit_code] { exit_code = cmd_select(*diff, *cov1, *cov2, *globs, *out); });
    }

    // measure
    {
        auto* sub = app.add_subcommand("measure", "Execute tests repeatedly under probes");
        auto cli = std::make_shared<RunCli>();
        cli->attach(sub, true);
        auto tests = std::make_shared<std::vector<std::string>>();
        auto selection = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        sub->add_option("--tests", *tests, "Test ids to measure")->delimiter(',');
        sub->add_option("--selection", *selection, "Selection JSON from `select`");
        sub->add_option("--log,--out-log", *out, "Measurement log output (JSON Lines)");
        sub->callback(
            [=, &exit_code] { exit_code = cmd_measure(*cli, *tests, *selection, *out); });
    }

    // delta
    {
        auto* sub = app.add_subcommand("delta", "Compute deltas and verdict from a log");
        auto cli = std::make_shared<RunCli>();
        cli->attach(sub, false);
        auto log = std::make_shared<std::string>();
        sub->add_option("--log", *log, "Measurement log (JSON Lines)")->required();
        sub->callback([=, &exit_code] { exit_code = cmd_delta(*cli, *log); });
    }

    // localize
    {
        auto* sub = app.add_subcommand("localize", "Rank changed lines by suspiciousness");
        auto report = std::make_shared<std::string>();
        auto cov1 = std::make_shared<std::string>();
        auto cov2 = std::make_shared<std::string>();
        auto metric = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto table = std::make_shared<bool>(false);
        sub->add_option("--report", *report, "Report JSON from `run` or `delta`")->required();
        sub->add_option("--cov-v1", *cov1, "v1 coverage JSON")->required();
        sub->add_option("--cov-v2", *cov2, "v2 coverage JSON")->required();
        sub->add_option("--metric", *metric, "Metric whose deltas define failing tests");
        sub->add_option("-o,--out", *out, "Rewrite the report with the ranking");
        sub->add_flag("--table", *table, "Print the ranking as a table");
        sub->callback([=, &exit_code] {
            exit_code = cmd_localize(*report, *cov1, *cov2, *metric, *out, *table);
        });
    }

    // run
    {
        auto* sub = app.add_subcommand("run", "Full pipeline: select, measure, delta, localize");
        auto cli = std::make_shared<RunCli>();
        cli->attach(sub, true);
        sub->callback([=, &exit_code] { exit_code = cmd_run(*cli); });
    }

    // history
    {
        auto* sub = app.add_subcommand("history", "Scan a commit list and summarize verdicts");
        auto repo = std::make_shared<std::string>(".");
        auto commits = std::make_shared<std::string>();
        auto tmpl = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        sub->add_option("--repo", *repo, "Repository directory ({repo} placeholder)");
        sub->add_option("--commits", *commits, "File of '<rev1> <rev2>' pairs")->required();
        sub->add_option("--config-template", *tmpl, "Pipeline config template JSON")->required();
        sub->add_option("-o,--out", *out, "Summary CSV path");
        sub->callback(
            [=, &exit_code] { exit_code = cmd_history(*repo, *commits, *tmpl, *out); });
    }

    // burn
    {
        auto* sub = app.add_subcommand("burn", "Consume an energy payload (Algorithm 1)");
        auto payload = std::make_shared<std::int64_t>(0);
        auto seed = std::make_shared<std::uint64_t>(42);
        auto wallclock = std::make_shared<bool>(false);
        auto probe = std::make_shared<ProbeCli>();
        sub->add_option("--payload-uj", *payload, "Energy payload in microjoules")->required();
        sub->add_option("--seed", *seed, "Fixed RNG seed (reproducible burns)");
        sub->add_flag("--wallclock-seed", *wallclock, "Seed from the current time instead");
        probe->attach(sub);
        sub->callback(
            [=, &exit_code] { exit_code = cmd_burn(*payload, *seed, *wallclock, *probe); });
    }

    // simulate
    {
        auto* sub = app.add_subcommand("simulate", "Run a synthetic-lab scenario");
        auto scenario = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        sub->add_option("--scenario", *scenario, "Scenario JSON")->required();
        sub->add_option("-o,--out", *out, "Outcome output path");
        sub->callback([=, &exit_code] { exit_code = cmd_simulate(*scenario, *out); });
    }

    // sweep
    {
        auto* sub = app.add_subcommand("sweep", "Sweep payload sizes over a scenario");
        auto scenario = std::make_shared<std::string>();
        auto payloads = std::make_shared<std::vector<double>>();
        auto runs = std::make_shared<int>(10);
        auto out = std::make_shared<std::string>();
        sub->add_option("--scenario", *scenario, "Scenario JSON (detection or localization)")->required();
        sub->add_option("--payloads", *payloads, "Payload sizes in microjoules")
            ->required()
            ->delimiter(',');
        sub->add_option("--runs", *runs, "Seeded runs per payload size");
        sub->add_option("-o,--out", *out, "CSV output path");
        sub->callback(
            [=, &exit_code] { exit_code = cmd_sweep(*scenario, *payloads, *runs, *out); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 64;
    } catch (const StageError& e) {
        std::cerr << "error " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return exit_code;
}
