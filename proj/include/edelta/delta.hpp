#pragma once

#include <map>
#include <vector>

#include "edelta/core.hpp"
#include "edelta/diff.hpp"
#include "edelta/runner.hpp"
#include "edelta/stats.hpp"

namespace edelta {

enum class Aggregator { Median, Mean };

const char* to_string(Aggregator a);
Aggregator aggregator_from_string(std::string_view s);

struct MissingMeasurements : Error {
    TestId test;
    Version version;

    MissingMeasurements(TestId t, Version v, MetricKind m)
        : Error("no " + std::string(metric_name(m)) + " measurements for test '" + t + "' on " +
                to_string(v)),
          test(std::move(t)), version(v) {}
};

// No selected test executes any changed line: the inputs are inconsistent
// with the selection.
struct ZeroTheta : Error {
    ZeroTheta() : Error("total changed-line execution count is zero") {}
};

// Per-test per-metric delta: aggregate(v2 repetitions) - aggregate(v1
// repetitions).
struct TestDelta {
    TestId test;
    MetricKind metric = MetricKind::EnergyPkg;
    double delta = 0.0;
    StabilitySummary v1_summary;
    StabilitySummary v2_summary;
};

// theta(l): executions of changed line l summed over the selected tests;
// phi(l) = theta(l) / Theta normalizes to a weight.
struct LineWeight {
    LineRef line;
    long long theta = 0;
    double phi = 0.0;
};

// omega(t) = sum over changed lines of phi(l) * exec(l,t); Omega(t) =
// delta(t) * omega(t); delta_omega = sum of Omega(t) -- the commit-level
// verdict quantity.
struct WeightedVerdict {
    MetricKind metric = MetricKind::EnergyPkg;
    std::map<TestId, double> omega_per_test;
    std::map<TestId, double> capital_omega_per_test;
    double delta_omega = 0.0;
    double abs_omega_total = 0.0; // sum of |Omega(t)|, the relative-threshold base
    bool breaking = false;
    Conclusiveness conclusive = Conclusiveness::Inconclusive;
    bool conclusiveness_checked = true;
    std::string annotation;
};

double aggregate(std::span<const double> xs, Aggregator a);

TestDelta per_test_delta(const MeasurementLog& log, const TestId& test, MetricKind metric,
                         Aggregator aggregator);

// Deleted lines draw exec(l,t) from v1 coverage, added lines from v2.
std::vector<LineWeight> line_weights(const ChangeSet& change, const TestSelection& selection,
                                     const CoverageMap& cov_v1, const CoverageMap& cov_v2);

WeightedVerdict weighted_delta(const std::map<TestId, double>& deltas,
                               const std::vector<LineWeight>& weights, const CoverageMap& cov_v1,
                               const CoverageMap& cov_v2, MetricKind metric);

// breaking iff delta_omega > threshold and (conclusive increase or the
// conclusiveness gate is disabled). The optional relative threshold
// additionally requires delta_omega / sum|Omega(t)| to exceed it.
WeightedVerdict classify(WeightedVerdict fragment, Conclusiveness conclusive, double threshold,
                         bool require_conclusive = true,
                         std::optional<double> relative_threshold = std::nullopt);

// Per-test range-intersection verdicts combined to commit level: any test
// with disjoint increasing ranges makes the commit conclusive-increase; else
// any conclusive decrease wins; otherwise inconclusive.
Conclusiveness commit_conclusiveness(const std::map<TestId, Conclusiveness>& per_test);

std::map<TestId, Conclusiveness> per_test_conclusiveness(const MeasurementLog& log,
                                                         const std::set<TestId>& tests,
                                                         MetricKind metric);

} // namespace edelta
