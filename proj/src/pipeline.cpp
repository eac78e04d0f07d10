#include "edelta/pipeline.hpp"

#include <algorithm>
#include <sstream>

#include "edelta/delta.hpp"
#include "edelta/faultloc.hpp"
#include "edelta/runner.hpp"

namespace edelta {

PipelineConfig PipelineConfig::from_json(const json& j) {
    PipelineConfig config;
    try {
        config.workspace_v1 = j.value("workspace_v1", std::string{});
        config.workspace_v2 = j.value("workspace_v2", std::string{});
        config.diff_source = j.value("diff", std::string{});
        config.coverage_v1 = j.value("coverage_v1", std::string{});
        config.coverage_v2 = j.value("coverage_v2", std::string{});
        config.test_command = j.value("test_command", std::string{});
        if (j.contains("probe"))
            config.probe = ProbeConfig::from_json(j.at("probe"));
        config.repetitions = j.value("repetitions", 10);
        config.warmup_runs = j.value("warmup_runs", 2);
        config.settle_ms = j.value("settle_ms", 500);
        if (j.contains("interleaving"))
            config.interleaving =
                interleaving_from_string(j.at("interleaving").get<std::string>());
        if (j.contains("tests_glob"))
            config.tests_glob = j.at("tests_glob").get<std::vector<std::string>>();
        if (j.contains("verdict_metric")) {
            auto metric = metric_from_name(j.at("verdict_metric").get<std::string>());
            if (!metric)
                throw ParseError(ParseError::Kind::Schema,
                                 "unknown verdict metric: " +
                                     j.at("verdict_metric").get<std::string>());
            config.verdict_metric = *metric;
        }
        config.threshold = j.value("threshold", 0.0);
        if (j.contains("relative_threshold") && !j.at("relative_threshold").is_null())
            config.relative_threshold = j.at("relative_threshold").get<double>();
        config.require_conclusive = j.value("require_conclusive", true);
        if (j.contains("aggregator"))
            config.aggregator = aggregator_from_string(j.at("aggregator").get<std::string>());
        config.cv_threshold = j.value("cv_threshold", 0.05);
        config.qcd_threshold = j.value("qcd_threshold", 0.05);
        config.output = j.value("output", std::string{});
        config.all_tests = j.value("all_tests", false);
    } catch (const json::exception& e) {
        throw ParseError(ParseError::Kind::Schema, std::string("bad pipeline config: ") + e.what());
    }
    return config;
}

json PipelineConfig::to_json() const {
    return json{{"workspace_v1", workspace_v1.string()},
                {"workspace_v2", workspace_v2.string()},
                {"diff", diff_source},
                {"coverage_v1", coverage_v1.string()},
                {"coverage_v2", coverage_v2.string()},
                {"test_command", test_command},
                {"probe", probe.to_json()},
                {"repetitions", repetitions},
                {"warmup_runs", warmup_runs},
                {"settle_ms", settle_ms},
                {"interleaving", std::string(to_string(interleaving))},
                {"tests_glob", tests_glob},
                {"verdict_metric", metric_name(verdict_metric)},
                {"threshold", threshold},
                {"relative_threshold", relative_threshold ? json(*relative_threshold) : json(nullptr)},
                {"require_conclusive", require_conclusive},
                {"aggregator", std::string(to_string(aggregator))},
                {"cv_threshold", cv_threshold},
                {"qcd_threshold", qcd_threshold},
                {"output", output.string()},
                {"all_tests", all_tests}};
}

void PipelineConfig::validate() const {
    if (!probe.enabled_metrics.count(verdict_metric))
        throw Error(std::string("verdict metric ") + metric_name(verdict_metric) +
                    " is not an enabled probe metric");
    if (test_command.empty())
        throw Error("no test command configured");
    for (const auto& [what, path] :
         std::initializer_list<std::pair<const char*, const std::filesystem::path&>>{
             {"workspace_v1", workspace_v1},
             {"workspace_v2", workspace_v2},
             {"coverage_v1", coverage_v1},
             {"coverage_v2", coverage_v2}}) {
        if (path.empty())
            throw Error(std::string(what) + " is not configured");
        if (!std::filesystem::exists(path))
            throw Error(std::string(what) + " does not exist: " + path.string());
    }
}

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

DeltaReport build_report(const PipelineConfig& config, const MeasurementLog& log,
                         const ChangeSet& change, const TestSelection& selection,
                         const CoverageMap& cov_v1, const CoverageMap& cov_v2,
                         const std::set<TestId>& measured_tests) {
    DeltaReport report;
    report.verdict_metric = config.verdict_metric;
    report.threshold = config.threshold;
    report.aggregator = config.aggregator;
    report.cv_threshold = config.cv_threshold;
    report.qcd_threshold = config.qcd_threshold;
    report.selection = selection;
    report.plan_digest = log.digest;

    report.weights = stage("delta", [&] {
        return line_weights(change, selection, cov_v1, cov_v2);
    });

    stage("delta", [&] {
        for (MetricKind metric : config.probe.enabled_metrics) {
            MetricReport mr;
            std::map<TestId, double> deltas;
            for (const TestId& t : measured_tests) {
                TestDelta d = per_test_delta(log, t, metric, config.aggregator);
                deltas[t] = d.delta;
                mr.tests[t] = std::move(d);
            }
            mr.test_conclusive = per_test_conclusiveness(log, measured_tests, metric);
            WeightedVerdict fragment =
                weighted_delta(deltas, report.weights, cov_v1, cov_v2, metric);
            mr.verdict = classify(std::move(fragment),
                                  commit_conclusiveness(mr.test_conclusive), config.threshold,
                                  config.require_conclusive, config.relative_threshold);
            report.metrics[metric] = std::move(mr);
        }
        return 0;
    });

    const MetricReport& verdict_mr = report.metrics.at(config.verdict_metric);
    if (verdict_mr.verdict.breaking)
        report.verdict = kVerdictBreaking;
    else if (verdict_mr.verdict.annotation == "inconclusive")
        report.verdict = kVerdictInconclusive;
    else
        report.verdict = kVerdictNotBreaking;

    if (verdict_mr.verdict.breaking) {
        stage("localize", [&] {
            std::map<TestId, double> deltas;
            for (const auto& [test, d] : verdict_mr.tests)
                deltas[test] = d.delta;
            const auto [failing, passing] = partition_tests(deltas);
            report.ranking =
                tarantula_scores(build_spectrum(change, failing, passing, cov_v1, cov_v2));
            return 0;
        });
    }
    return report;
}

DeltaReport no_covering_tests_report(const PipelineConfig& config,
                                     const TestSelection& selection) {
    DeltaReport report;
    report.verdict = kVerdictNoCoveringTests;
    report.verdict_metric = config.verdict_metric;
    report.threshold = config.threshold;
    report.aggregator = config.aggregator;
    report.cv_threshold = config.cv_threshold;
    report.qcd_threshold = config.qcd_threshold;
    report.selection = selection;
    return report;
}

} // namespace

DeltaReport analyze_log(const PipelineConfig& config, const MeasurementLog& log,
                        const ChangeSet& change, const TestSelection& selection) {
    const CoverageMap cov_v1 = stage("select", [&] { return load_coverage(config.coverage_v1); });
    const CoverageMap cov_v2 = stage("select", [&] { return load_coverage(config.coverage_v2); });
    if (selection.selected.empty())
        return no_covering_tests_report(config, selection);
    // Every selected test must be in the log (missing measurements are an
    // error); extra coverage-known tests from a full-suite log are reported
    // informationally and carry zero weight.
    std::set<TestId> measured = selection.selected;
    for (const TestId& t : log.tests())
        if ((cov_v1.tests.count(t) || cov_v2.tests.count(t)) &&
            !selection.discarded_modified.count(t))
            measured.insert(t);
    return build_report(config, log, change, selection, cov_v1, cov_v2, measured);
}

DeltaReport run_pipeline(const PipelineConfig& config, std::optional<std::string> diff_text) {
    stage("config", [&] {
        config.validate();
        return 0;
    });

    // Step 1: select the tests covering the change.
    const std::string diff = diff_text ? *diff_text
                                       : stage("select", [&] {
                                             return read_text_file(config.diff_source);
                                         });
    const ChangeSet change = stage("select", [&] { return parse_unified_diff(diff); });
    const CoverageMap cov_v1 = stage("select", [&] { return load_coverage(config.coverage_v1); });
    const CoverageMap cov_v2 = stage("select", [&] { return load_coverage(config.coverage_v2); });
    const std::set<std::string> test_files =
        match_test_files(change.touched_files, config.tests_glob);
    const TestSelection selection =
        stage("select", [&] { return select_tests(change, cov_v1, cov_v2, test_files); });

    std::set<TestId> to_measure = selection.selected;
    if (config.all_tests) {
        for (const auto& [test, lines] : cov_v1.tests) {
            (void)lines;
            if (!selection.discarded_modified.count(test))
                to_measure.insert(test);
        }
        for (const auto& [test, lines] : cov_v2.tests) {
            (void)lines;
            if (!selection.discarded_modified.count(test))
                to_measure.insert(test);
        }
    }

    if (selection.selected.empty()) {
        DeltaReport report = no_covering_tests_report(config, selection);
        if (!config.output.empty())
            stage("report", [&] {
                save_report(report, config.output);
                return 0;
            });
        return report;
    }

    // Steps 2+3: instrument (probe brackets) and execute repeatedly.
    RunPlan plan;
    plan.tests.assign(to_measure.begin(), to_measure.end());
    plan.repetitions = config.repetitions;
    plan.workspaces[Version::V1] = config.workspace_v1;
    plan.workspaces[Version::V2] = config.workspace_v2;
    plan.test_command_template = config.test_command;
    plan.warmup_runs = config.warmup_runs;
    plan.interleaving = config.interleaving;
    plan.settle_ms = config.settle_ms;

    const MeasurementLog log = stage("measure", [&] { return execute_plan(plan, config.probe); });

    // Step 4: deltas, verdict, and localization when breaking.
    DeltaReport report =
        build_report(config, log, change, selection, cov_v1, cov_v2, to_measure);
    if (!config.output.empty())
        stage("report", [&] {
            save_report(report, config.output);
            return 0;
        });
    return report;
}

namespace {

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos)
        return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += "\"\"";
        out += c;
    }
    out += "\"";
    return out;
}

std::string substitute_placeholders(std::string text, const std::string& rev1,
                                    const std::string& rev2, const std::string& repo, int index) {
    auto replace = [&](std::string_view placeholder, const std::string& value) {
        std::size_t pos = 0;
        while ((pos = text.find(placeholder, pos)) != std::string::npos) {
            text.replace(pos, placeholder.size(), value);
            pos += value.size();
        }
    };
    replace("{rev1}", rev1);
    replace("{rev2}", rev2);
    replace("{repo}", repo);
    replace("{index}", std::to_string(index));
    return text;
}

} // namespace

std::string history_scan(const HistoryOptions& options) {
    const std::string template_text = read_text_file(options.config_template);
    const std::string commits_text = read_text_file(options.commits_file);

    std::vector<std::pair<std::string, std::string>> pairs;
    std::istringstream lines(commits_text);
    std::string line;
    while (std::getline(lines, line)) {
        std::istringstream fields(line);
        std::string rev1, rev2;
        if (!(fields >> rev1) || rev1.front() == '#')
            continue;
        if (!(fields >> rev2))
            throw Error("commit list line needs two revisions: " + line);
        pairs.emplace_back(rev1, rev2);
    }
    if (pairs.empty())
        throw Error("commit list is empty: " + options.commits_file.string());

    // Metric columns come from the template's probe config; read the list
    // without resolving per-commit paths.
    std::vector<MetricKind> metric_columns;
    {
        const json probe_template =
            json::parse(substitute_placeholders(template_text, "", "", options.repo.string(), 0));
        std::set<MetricKind> metrics = ProbeConfig{}.enabled_metrics;
        if (probe_template.contains("probe") && probe_template["probe"].contains("metrics")) {
            metrics.clear();
            for (const auto& name : probe_template["probe"]["metrics"]) {
                auto metric = metric_from_name(name.get<std::string>());
                if (!metric)
                    throw ParseError(ParseError::Kind::Schema,
                                     "unknown metric in template: " + name.get<std::string>());
                metrics.insert(*metric);
            }
        }
        metric_columns.assign(metrics.begin(), metrics.end());
    }

    std::string csv = "index,rev1,rev2,selected";
    for (MetricKind m : metric_columns)
        csv += std::string(",delta_omega_") + metric_name(m);
    csv += ",verdict,conclusive,exit,error\n";

    int breaking = 0;
    int completed = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& [rev1, rev2] = pairs[i];
        std::string row = std::to_string(i) + "," + csv_escape(rev1) + "," + csv_escape(rev2);
        try {
            const std::string config_text = substitute_placeholders(
                template_text, rev1, rev2, options.repo.string(), static_cast<int>(i));
            json config_json;
            try {
                config_json = json::parse(config_text);
            } catch (const json::parse_error& e) {
                throw ParseError(ParseError::Kind::BadJson,
                                 std::string("config template: ") + e.what());
            }
            if (config_json.contains("prepare_cmd")) {
                const std::string cmd = config_json.at("prepare_cmd").get<std::string>();
                const int code = run_shell(
                    cmd, options.repo.empty() ? std::filesystem::path(".") : options.repo);
                if (code != 0)
                    throw Error("prepare_cmd exited with " + std::to_string(code));
                config_json.erase("prepare_cmd");
            }
            const PipelineConfig config = PipelineConfig::from_json(config_json);
            const DeltaReport report = run_pipeline(config);

            row += "," + std::to_string(report.selection.selected.size());
            for (MetricKind m : metric_columns) {
                auto it = report.metrics.find(m);
                row += ",";
                if (it != report.metrics.end()) {
                    std::ostringstream value;
                    value << it->second.verdict.delta_omega;
                    row += value.str();
                }
            }
            std::string conclusive = "";
            if (auto it = report.metrics.find(report.verdict_metric); it != report.metrics.end())
                conclusive = to_string(it->second.verdict.conclusive);
            row += "," + report.verdict + "," + conclusive + "," +
                   std::to_string(report.exit_code()) + ",";
            if (report.verdict == kVerdictBreaking)
                ++breaking;
            ++completed;
        } catch (const std::exception& e) {
            // selected and metric cells stay empty, then verdict/conclusive/
            // exit empty, error last.
            row += ",";
            for (MetricKind m : metric_columns) {
                (void)m;
                row += ",";
            }
            row += ",,,," + csv_escape(e.what());
        }
        csv += row + "\n";
    }

    std::ostringstream footer;
    footer << "# breaking: " << breaking << "/" << pairs.size() << " (";
    footer.precision(1);
    footer << std::fixed << (pairs.size() ? 100.0 * breaking / pairs.size() : 0.0) << "%)";
    if (completed != static_cast<int>(pairs.size()))
        footer << " [" << (pairs.size() - completed) << " commits failed]";
    csv += footer.str() + "\n";

    if (!options.out_csv.empty())
        write_text_file(options.out_csv, csv);
    return csv;
}

} // namespace edelta
