#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "edelta/core.hpp"
#include "edelta/report.hpp"
#include "edelta/runner.hpp"

namespace edelta {

// Deterministic synthetic project: each line carries a per-execution energy
// cost, each test a coverage vector. A test's measured energy is
// sum(exec(l,t) * cost(l)) times multiplicative noise; duration and
// instruction counts derive linearly from it. This linear model is enough to
// exercise every formula downstream of measurement.
struct SyntheticProject {
    struct Line {
        FileLine at;
        double cost_uj = 0.0;
    };
    struct Test {
        TestId id;
        std::map<FileLine, int> covers;
    };

    std::vector<Line> lines;
    std::vector<Test> tests;
    double noise_rel = 0.0;
    std::uint64_t seed = 0;

    static SyntheticProject from_json(const json& j);
    json to_json() const;
};

struct ExperimentOutcome {
    std::set<LineRef> injected_ground_truth;
    bool detected_breaking = false;
    std::optional<int> rank_of_truth; // present iff breaking and ground truth non-empty
    double delta_omega = 0.0;
    std::map<TestId, double> per_test_deltas;
    std::string verdict;
    Conclusiveness conclusive = Conclusiveness::Inconclusive;
    bool undetectable = false; // mutated line covered by no test
    SuspiciousnessRanking ranking;

    json to_json() const;
};

// Mutated-version measurement: v2 costs = v1 costs + per-line deltas.
// Changed lines are modeled as v2 additions (the mutation injects code).
MeasurementLog synthesize_log(const SyntheticProject& project,
                              const std::map<FileLine, double>& v2_cost_delta, int reps,
                              const std::vector<TestId>& tests);

CoverageMap coverage_of(const SyntheticProject& project, Version v);

// Controlled single-line mutation: does the pipeline tag it breaking?
// payload_uj == 0 is the identity mutation.
ExperimentOutcome run_detection_experiment(const SyntheticProject& project, double payload_uj,
                                           const FileLine& target, int reps);

// One payload line among benign decoys (cost deltas <= 0): does the payload
// line reach rank 1?
ExperimentOutcome run_localization_experiment(const SyntheticProject& project,
                                              const std::set<FileLine>& decoys,
                                              double decoy_delta_uj,
                                              const FileLine& payload_target, double payload_uj,
                                              int reps);

// Repeated measurement of the unmodified project; needs reps >= 4 so
// quartiles exist.
std::map<TestId, std::map<MetricKind, StabilitySummary>> run_stability_experiment(
    const SyntheticProject& project, int reps);

// Scenario file driver: {"project": {...}, "experiment": {"kind": "stability"|
// "detection"|"localization", ...}} -> outcome JSON.
json run_scenario(const json& scenario);

// Payload sweep; CSV columns: payload_uj, breaking_rate, mean_rank.
std::string run_sweep(const json& scenario, const std::vector<double>& payloads, int runs);

} // namespace edelta
