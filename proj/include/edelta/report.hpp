#pragma once

#include <map>
#include <string>
#include <vector>

#include "edelta/delta.hpp"
#include "edelta/diff.hpp"
#include "edelta/faultloc.hpp"

namespace edelta {

// Commit-level verdict strings and the CI exit-code contract:
// 0 not-breaking, 1 breaking, 2 inconclusive / no-covering-tests.
inline constexpr const char* kVerdictBreaking = "breaking";
inline constexpr const char* kVerdictNotBreaking = "not-breaking";
inline constexpr const char* kVerdictInconclusive = "inconclusive";
inline constexpr const char* kVerdictNoCoveringTests = "no-covering-tests";

struct MetricReport {
    WeightedVerdict verdict;
    std::map<TestId, TestDelta> tests;
    std::map<TestId, Conclusiveness> test_conclusive;
};

// The pipeline's end product: per-test per-metric deltas and stability
// indicators, line weights, delta_omega per metric, the verdict and, for
// breaking commits, the suspiciousness ranking.
struct DeltaReport {
    std::string verdict;
    MetricKind verdict_metric = MetricKind::EnergyPkg;
    double threshold = 0.0;
    Aggregator aggregator = Aggregator::Median;
    double cv_threshold = 0.05;
    double qcd_threshold = 0.05;
    TestSelection selection;
    std::vector<LineWeight> weights;
    std::map<MetricKind, MetricReport> metrics;
    SuspiciousnessRanking ranking;
    std::string plan_digest;

    int exit_code() const;
};

json report_to_json(const DeltaReport& report);
DeltaReport report_from_json(const json& j);

// Canonical JSON on disk; reloading yields a structurally equal report.
void save_report(const DeltaReport& report, const std::filesystem::path& path);
DeltaReport load_report(const std::filesystem::path& path);

bool structurally_equal(const DeltaReport& a, const DeltaReport& b);

// Human-readable table for terminal output.
std::string render_table(const DeltaReport& report);

} // namespace edelta
