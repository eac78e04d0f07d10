#include "edelta/simlab.hpp"

#include <algorithm>
#include <cmath>

#include "edelta/delta.hpp"
#include "edelta/faultloc.hpp"

namespace edelta {

namespace {

// Derived-metric scale factors: 1 J/s of power and a fixed energy cost per
// instruction keep the synthetic metrics linearly tied to energy.
constexpr double kSecondsPerMicrojoule = 1e-6;
constexpr double kInstructionsPerMicrojoule = 100.0;

constexpr MetricKind kSimMetrics[] = {MetricKind::EnergyPkg, MetricKind::DurationSeconds,
                                      MetricKind::Instructions};

double derived_value(MetricKind m, double energy_uj) {
    switch (m) {
    case MetricKind::EnergyPkg: return energy_uj;
    case MetricKind::DurationSeconds: return energy_uj * kSecondsPerMicrojoule;
    case MetricKind::Instructions: return energy_uj * kInstructionsPerMicrojoule;
    default: return 0.0;
    }
}

} // namespace

SyntheticProject SyntheticProject::from_json(const json& j) {
    SyntheticProject p;
    try {
        p.seed = j.value("seed", 0ULL);
        p.noise_rel = j.value("noise_rel", 0.0);
        for (const json& l : j.at("lines")) {
            Line line;
            line.at.file = normalize_path(l.at("file").get<std::string>());
            line.at.line = l.at("line").get<int>();
            line.cost_uj = l.at("cost_uj").get<double>();
            if (line.at.line < 1)
                throw ParseError(ParseError::Kind::Schema, "line numbers are 1-based");
            if (!(line.cost_uj >= 0.0))
                throw ParseError(ParseError::Kind::Schema, "line cost must be >= 0");
            p.lines.push_back(std::move(line));
        }
        for (const json& t : j.at("tests")) {
            Test test;
            test.id = t.at("id").get<std::string>();
            if (test.id.empty())
                throw ParseError(ParseError::Kind::Schema, "empty test id");
            if (t.contains("covers")) {
                for (const auto& [file, hits] : t.at("covers").items()) {
                    const std::string norm = normalize_path(file);
                    for (const auto& [line_str, count] : hits.items()) {
                        const int line = std::stoi(line_str);
                        if (count.get<int>() < 1)
                            throw ParseError(ParseError::Kind::Schema,
                                             "coverage counts must be >= 1");
                        test.covers[FileLine{norm, line}] = count.get<int>();
                    }
                }
            }
            p.tests.push_back(std::move(test));
        }
    } catch (const json::exception& e) {
        throw ParseError(ParseError::Kind::Schema, std::string("bad synthetic project: ") + e.what());
    }
    if (p.noise_rel < 0.0 || p.noise_rel >= 1.0)
        throw ParseError(ParseError::Kind::Schema, "noise_rel must be in [0, 1)");
    if (p.tests.empty())
        throw ParseError(ParseError::Kind::Schema, "synthetic project needs at least one test");
    // Coverage must refer to known lines.
    std::set<FileLine> known;
    for (const Line& l : p.lines)
        known.insert(l.at);
    for (const Test& t : p.tests)
        for (const auto& [fl, count] : t.covers) {
            (void)count;
            if (!known.count(fl))
                throw ParseError(ParseError::Kind::Schema,
                                 "coverage refers to unknown line " + fl.file + ":" +
                                     std::to_string(fl.line));
        }
    return p;
}

json SyntheticProject::to_json() const {
    json lines_j = json::array();
    for (const Line& l : lines)
        lines_j.push_back(json{{"file", l.at.file}, {"line", l.at.line}, {"cost_uj", l.cost_uj}});
    json tests_j = json::array();
    for (const Test& t : tests) {
        json covers = json::object();
        for (const auto& [fl, count] : t.covers)
            covers[fl.file][std::to_string(fl.line)] = count;
        tests_j.push_back(json{{"id", t.id}, {"covers", std::move(covers)}});
    }
    return json{{"seed", seed},
                {"noise_rel", noise_rel},
                {"lines", std::move(lines_j)},
                {"tests", std::move(tests_j)}};
}

json ExperimentOutcome::to_json() const {
    json truth = json::array();
    for (const LineRef& l : injected_ground_truth)
        truth.push_back(
            json{{"file", l.file}, {"line", l.line}, {"version", to_string(l.version)}});
    json j{{"injected_ground_truth", std::move(truth)},
           {"detected_breaking", detected_breaking},
           {"delta_omega", delta_omega},
           {"per_test_deltas", per_test_deltas},
           {"verdict", verdict},
           {"conclusive", to_string(conclusive)},
           {"undetectable", undetectable},
           {"ranking", ranking_to_json(ranking)}};
    j["rank_of_truth"] = rank_of_truth ? json(*rank_of_truth) : json(nullptr);
    return j;
}

CoverageMap coverage_of(const SyntheticProject& project, Version v) {
    CoverageMap cov;
    cov.version = v;
    for (const SyntheticProject::Test& t : project.tests)
        cov.tests[t.id] = t.covers;
    return cov;
}

MeasurementLog synthesize_log(const SyntheticProject& project,
                              const std::map<FileLine, double>& v2_cost_delta, int reps,
                              const std::vector<TestId>& tests) {
    std::map<FileLine, double> cost_v1;
    for (const SyntheticProject::Line& l : project.lines)
        cost_v1[l.at] = l.cost_uj;
    std::map<FileLine, double> cost_v2 = cost_v1;
    for (const auto& [fl, delta] : v2_cost_delta) {
        cost_v2[fl] += delta;
        if (cost_v2[fl] < 0.0)
            throw Error("mutation drives line cost below zero at " + fl.file + ":" +
                        std::to_string(fl.line));
    }

    SimulatedProbeSpec noise_spec;
    noise_spec.seed = project.seed;
    noise_spec.noise_rel = project.noise_rel;
    const std::string probe_id = "simlab:seed=" + std::to_string(project.seed);

    MeasurementLog log;
    log.digest = probe_id;
    for (const TestId& id : tests) {
        auto test = std::find_if(project.tests.begin(), project.tests.end(),
                                 [&](const SyntheticProject::Test& t) { return t.id == id; });
        if (test == project.tests.end())
            throw Error("unknown synthetic test: " + id);
        for (Version v : {Version::V1, Version::V2}) {
            const auto& costs = v == Version::V1 ? cost_v1 : cost_v2;
            double energy = 0.0;
            for (const auto& [fl, count] : test->covers)
                energy += static_cast<double>(count) * costs.at(fl);
            for (int i = 0; i < reps; ++i) {
                MeasurementRecord r;
                r.test = id;
                r.version = v;
                r.iteration = i;
                r.probe_id = probe_id;
                for (MetricKind m : kSimMetrics)
                    r.values[m] = derived_value(m, energy) *
                                  simulated_noise_factor(noise_spec, id, v, i, m);
                log.records.push_back(std::move(r));
            }
        }
    }
    return log;
}

namespace {

// Shared detection/localization driver: apply the cost deltas, run
// selection -> measurement -> delta -> verdict -> (localization).
ExperimentOutcome run_mutation_experiment(const SyntheticProject& project,
                                          const std::map<FileLine, double>& v2_cost_delta,
                                          const std::set<FileLine>& changed,
                                          const std::set<FileLine>& ground_truth, int reps) {
    if (reps < 1)
        throw Error("repetitions must be >= 1");

    ExperimentOutcome outcome;
    for (const FileLine& fl : ground_truth)
        outcome.injected_ground_truth.insert(LineRef{fl.file, fl.line, Version::V2});

    ChangeSet change;
    for (const FileLine& fl : changed) {
        change.additions.insert(LineRef{fl.file, fl.line, Version::V2});
        change.touched_files.insert(fl.file);
    }

    const CoverageMap cov_v1 = coverage_of(project, Version::V1);
    const CoverageMap cov_v2 = coverage_of(project, Version::V2);
    const TestSelection selection = select_tests(change, cov_v1, cov_v2, {});

    if (selection.selected.empty()) {
        outcome.verdict = kVerdictNoCoveringTests;
        outcome.undetectable = true;
        return outcome;
    }
    // Ground truth no selected test reaches is undetectable even if decoys
    // are covered.
    for (const LineRef& truth : outcome.injected_ground_truth) {
        bool covered = false;
        for (const TestId& t : selection.selected)
            covered = covered || cov_v2.exec(truth, t) > 0;
        if (!covered)
            outcome.undetectable = true;
    }

    const std::vector<TestId> tests(selection.selected.begin(), selection.selected.end());
    const MeasurementLog log = synthesize_log(project, v2_cost_delta, reps, tests);

    std::map<TestId, double> deltas;
    for (const TestId& t : tests)
        deltas[t] = per_test_delta(log, t, MetricKind::EnergyPkg, Aggregator::Median).delta;

    const std::vector<LineWeight> weights = line_weights(change, selection, cov_v1, cov_v2);
    WeightedVerdict verdict =
        weighted_delta(deltas, weights, cov_v1, cov_v2, MetricKind::EnergyPkg);
    const Conclusiveness conclusive = commit_conclusiveness(
        per_test_conclusiveness(log, selection.selected, MetricKind::EnergyPkg));
    verdict = classify(std::move(verdict), conclusive, 0.0, true);

    outcome.detected_breaking = verdict.breaking;
    outcome.delta_omega = verdict.delta_omega;
    outcome.per_test_deltas = deltas;
    outcome.conclusive = verdict.conclusive;
    outcome.verdict = verdict.breaking ? kVerdictBreaking
                      : (verdict.annotation == "inconclusive" ? kVerdictInconclusive
                                                              : kVerdictNotBreaking);

    if (verdict.breaking) {
        const auto [failing, passing] = partition_tests(deltas);
        outcome.ranking =
            tarantula_scores(build_spectrum(change, failing, passing, cov_v1, cov_v2));
        if (!outcome.injected_ground_truth.empty()) {
            for (std::size_t i = 0; i < outcome.ranking.entries.size(); ++i) {
                if (outcome.injected_ground_truth.count(outcome.ranking.entries[i].line)) {
                    outcome.rank_of_truth = static_cast<int>(i) + 1;
                    break;
                }
            }
        }
    }
    return outcome;
}

const SyntheticProject::Line* find_line(const SyntheticProject& project, const FileLine& at) {
    for (const SyntheticProject::Line& l : project.lines)
        if (l.at == at)
            return &l;
    return nullptr;
}

} // namespace

ExperimentOutcome run_detection_experiment(const SyntheticProject& project, double payload_uj,
                                           const FileLine& target, int reps) {
    if (!find_line(project, target))
        throw Error("detection target is not a project line: " + target.file + ":" +
                    std::to_string(target.line));
    if (payload_uj < 0.0)
        throw Error("payload must be >= 0");

    std::map<FileLine, double> deltas;
    deltas[target] = payload_uj;
    return run_mutation_experiment(project, deltas, {target}, {target}, reps);
}

ExperimentOutcome run_localization_experiment(const SyntheticProject& project,
                                              const std::set<FileLine>& decoys,
                                              double decoy_delta_uj,
                                              const FileLine& payload_target, double payload_uj,
                                              int reps) {
    if (decoys.count(payload_target))
        throw Error("payload target must not be a decoy line");
    if (decoy_delta_uj > 0.0)
        throw Error("decoy changes must not increase cost");
    if (payload_uj < 0.0)
        throw Error("payload must be >= 0");
    if (!find_line(project, payload_target))
        throw Error("localization payload target is not a project line");
    for (const FileLine& d : decoys)
        if (!find_line(project, d))
            throw Error("localization decoy is not a project line: " + d.file + ":" +
                        std::to_string(d.line));

    std::map<FileLine, double> cost_deltas;
    std::set<FileLine> changed = decoys;
    changed.insert(payload_target);
    for (const FileLine& d : decoys)
        cost_deltas[d] = decoy_delta_uj;
    std::set<FileLine> truth;
    if (payload_uj > 0.0) {
        cost_deltas[payload_target] = payload_uj;
        truth.insert(payload_target);
    }
    return run_mutation_experiment(project, cost_deltas, changed, truth, reps);
}

std::map<TestId, std::map<MetricKind, StabilitySummary>> run_stability_experiment(
    const SyntheticProject& project, int reps) {
    if (reps < 4)
        throw SampleTooSmall("stability experiment needs reps >= 4 (quartiles)");

    std::vector<TestId> tests;
    for (const SyntheticProject::Test& t : project.tests)
        tests.push_back(t.id);
    const MeasurementLog log = synthesize_log(project, {}, reps, tests);

    std::map<TestId, std::map<MetricKind, StabilitySummary>> out;
    for (const TestId& t : tests)
        for (MetricKind m : kSimMetrics)
            out[t][m] = summarize(log.values(t, Version::V1, m));
    return out;
}

namespace {

FileLine file_line_from_json(const json& j) {
    return FileLine{normalize_path(j.at("file").get<std::string>()), j.at("line").get<int>()};
}

} // namespace

json run_scenario(const json& scenario) {
    SyntheticProject project;
    json experiment;
    try {
        project = SyntheticProject::from_json(scenario.at("project"));
        experiment = scenario.at("experiment");
    } catch (const json::exception& e) {
        throw ParseError(ParseError::Kind::Schema, std::string("bad scenario: ") + e.what());
    }

    const std::string kind = experiment.value("kind", "detection");
    const int reps = experiment.value("reps", 10);

    if (kind == "stability") {
        const auto summaries = run_stability_experiment(project, reps);
        json tests = json::object();
        for (const auto& [test, metrics] : summaries) {
            json per_metric = json::object();
            for (const auto& [metric, s] : metrics) {
                json m{{"mean", s.mean}, {"stddev", s.stddev}, {"q1", s.q1},   {"q3", s.q3},
                       {"min", s.min},   {"max", s.max},       {"n", s.n}};
                m["cv"] = s.cv ? json(*s.cv) : json(nullptr);
                m["qcd"] = s.qcd ? json(*s.qcd) : json(nullptr);
                per_metric[metric_name(metric)] = std::move(m);
            }
            tests[test] = std::move(per_metric);
        }
        return json{{"kind", "stability"}, {"summaries", std::move(tests)}};
    }
    if (kind == "detection") {
        const ExperimentOutcome outcome =
            run_detection_experiment(project, experiment.value("payload_uj", 0.0),
                                     file_line_from_json(experiment.at("target")), reps);
        json out = outcome.to_json();
        out["kind"] = "detection";
        return out;
    }
    if (kind == "localization") {
        std::set<FileLine> decoys;
        for (const json& d : experiment.at("decoys"))
            decoys.insert(file_line_from_json(d));
        const ExperimentOutcome outcome = run_localization_experiment(
            project, decoys, experiment.value("decoy_delta_uj", 0.0),
            file_line_from_json(experiment.at("target")), experiment.value("payload_uj", 0.0),
            reps);
        json out = outcome.to_json();
        out["kind"] = "localization";
        return out;
    }
    throw ParseError(ParseError::Kind::Schema, "unknown experiment kind: " + kind);
}

std::string run_sweep(const json& scenario, const std::vector<double>& payloads, int runs) {
    if (runs < 1)
        throw Error("sweep needs at least one run per payload");

    SyntheticProject base = SyntheticProject::from_json(scenario.at("project"));
    const json& experiment = scenario.at("experiment");
    const std::string kind = experiment.value("kind", "detection");
    if (kind != "detection" && kind != "localization")
        throw Error("sweep supports detection and localization scenarios");
    const int reps = experiment.value("reps", 10);

    std::string csv = "payload_uj,breaking_rate,mean_rank\n";
    for (double payload : payloads) {
        int breaking = 0;
        double rank_sum = 0.0;
        int rank_count = 0;
        for (int k = 0; k < runs; ++k) {
            SyntheticProject project = base;
            project.seed = base.seed + static_cast<std::uint64_t>(k);
            ExperimentOutcome outcome;
            if (kind == "detection") {
                outcome = run_detection_experiment(
                    project, payload, file_line_from_json(experiment.at("target")), reps);
            } else {
                std::set<FileLine> decoys;
                for (const json& d : experiment.at("decoys"))
                    decoys.insert(file_line_from_json(d));
                outcome = run_localization_experiment(
                    project, decoys, experiment.value("decoy_delta_uj", 0.0),
                    file_line_from_json(experiment.at("target")), payload, reps);
            }
            if (outcome.detected_breaking)
                ++breaking;
            if (outcome.rank_of_truth) {
                rank_sum += *outcome.rank_of_truth;
                ++rank_count;
            }
        }
        csv += std::to_string(payload) + "," +
               std::to_string(static_cast<double>(breaking) / runs) + ",";
        if (rank_count > 0)
            csv += std::to_string(rank_sum / rank_count);
        csv += "\n";
    }
    return csv;
}

} // namespace edelta
