#include "edelta/delta.hpp"

#include <cmath>

namespace edelta {

const char* to_string(Aggregator a) {
    return a == Aggregator::Median ? "median" : "mean";
}

Aggregator aggregator_from_string(std::string_view s) {
    if (s == "median")
        return Aggregator::Median;
    if (s == "mean")
        return Aggregator::Mean;
    throw ParseError(ParseError::Kind::Schema, "unknown aggregator: " + std::string(s));
}

double aggregate(std::span<const double> xs, Aggregator a) {
    return a == Aggregator::Median ? median(xs) : mean(xs);
}

TestDelta per_test_delta(const MeasurementLog& log, const TestId& test, MetricKind metric,
                         Aggregator aggregator) {
    const std::vector<double> v1 = log.values(test, Version::V1, metric);
    const std::vector<double> v2 = log.values(test, Version::V2, metric);
    if (v1.empty())
        throw MissingMeasurements(test, Version::V1, metric);
    if (v2.empty())
        throw MissingMeasurements(test, Version::V2, metric);

    TestDelta d;
    d.test = test;
    d.metric = metric;
    d.v1_summary = summarize(v1);
    d.v2_summary = summarize(v2);
    d.delta = aggregate(v2, aggregator) - aggregate(v1, aggregator);
    return d;
}

std::vector<LineWeight> line_weights(const ChangeSet& change, const TestSelection& selection,
                                     const CoverageMap& cov_v1, const CoverageMap& cov_v2) {
    if (selection.selected.empty())
        throw Error("line weights need a non-empty test selection");

    std::vector<LineWeight> weights;
    auto add_lines = [&](const std::set<LineRef>& lines, const CoverageMap& cov) {
        for (const LineRef& l : lines) {
            LineWeight w;
            w.line = l;
            for (const TestId& t : selection.selected)
                w.theta += cov.exec(l, t);
            weights.push_back(std::move(w));
        }
    };
    add_lines(change.deletions, cov_v1);
    add_lines(change.additions, cov_v2);

    long long total = 0;
    for (const LineWeight& w : weights)
        total += w.theta;
    if (total == 0)
        throw ZeroTheta();
    for (LineWeight& w : weights)
        w.phi = static_cast<double>(w.theta) / static_cast<double>(total);
    return weights;
}

WeightedVerdict weighted_delta(const std::map<TestId, double>& deltas,
                               const std::vector<LineWeight>& weights, const CoverageMap& cov_v1,
                               const CoverageMap& cov_v2, MetricKind metric) {
    WeightedVerdict verdict;
    verdict.metric = metric;
    for (const auto& [test, delta] : deltas) {
        if (!cov_v1.tests.count(test) && !cov_v2.tests.count(test))
            throw Error("test has no coverage entries: " + test);
        double omega = 0.0;
        for (const LineWeight& w : weights) {
            const CoverageMap& cov = w.line.version == Version::V1 ? cov_v1 : cov_v2;
            omega += w.phi * static_cast<double>(cov.exec(w.line, test));
        }
        verdict.omega_per_test[test] = omega;
        verdict.capital_omega_per_test[test] = delta * omega;
        verdict.delta_omega += delta * omega;
        verdict.abs_omega_total += std::abs(delta * omega);
    }
    return verdict;
}

WeightedVerdict classify(WeightedVerdict fragment, Conclusiveness conclusive, double threshold,
                         bool require_conclusive, std::optional<double> relative_threshold) {
    fragment.conclusive = conclusive;
    fragment.conclusiveness_checked = require_conclusive;
    bool exceeds = fragment.delta_omega > threshold;
    if (exceeds && relative_threshold) {
        exceeds = fragment.abs_omega_total > 0.0 &&
                  fragment.delta_omega / fragment.abs_omega_total > *relative_threshold;
    }
    if (!require_conclusive) {
        fragment.breaking = exceeds;
    } else {
        fragment.breaking = exceeds && conclusive == Conclusiveness::ConclusiveIncrease;
        if (exceeds && conclusive != Conclusiveness::ConclusiveIncrease)
            fragment.annotation = "inconclusive";
    }
    return fragment;
}

Conclusiveness commit_conclusiveness(const std::map<TestId, Conclusiveness>& per_test) {
    bool any_decrease = false;
    for (const auto& [test, c] : per_test) {
        if (c == Conclusiveness::ConclusiveIncrease)
            return Conclusiveness::ConclusiveIncrease;
        if (c == Conclusiveness::ConclusiveDecrease)
            any_decrease = true;
    }
    return any_decrease ? Conclusiveness::ConclusiveDecrease : Conclusiveness::Inconclusive;
}

std::map<TestId, Conclusiveness> per_test_conclusiveness(const MeasurementLog& log,
                                                         const std::set<TestId>& tests,
                                                         MetricKind metric) {
    std::map<TestId, Conclusiveness> out;
    for (const TestId& t : tests) {
        const std::vector<double> v1 = log.values(t, Version::V1, metric);
        const std::vector<double> v2 = log.values(t, Version::V2, metric);
        if (v1.empty() || v2.empty()) {
            out[t] = Conclusiveness::Inconclusive;
            continue;
        }
        out[t] = ranges_disjoint(v1, v2);
    }
    return out;
}

} // namespace edelta
