#include "edelta/faultloc.hpp"

#include <algorithm>

namespace edelta {

std::pair<std::set<TestId>, std::set<TestId>> partition_tests(
    const std::map<TestId, double>& deltas) {
    std::set<TestId> failing;
    std::set<TestId> passing;
    for (const auto& [test, delta] : deltas) {
        if (delta > 0.0)
            failing.insert(test);
        else
            passing.insert(test);
    }
    return {failing, passing};
}

Spectrum build_spectrum(const ChangeSet& change, const std::set<TestId>& failing,
                        const std::set<TestId>& passing, const CoverageMap& cov_v1,
                        const CoverageMap& cov_v2) {
    Spectrum spectrum;
    spectrum.failing_total = static_cast<int>(failing.size());
    spectrum.passing_total = static_cast<int>(passing.size());

    auto add_lines = [&](const std::set<LineRef>& lines, const CoverageMap& cov) {
        for (const LineRef& l : lines) {
            Spectrum::LineCounts counts;
            counts.line = l;
            for (const TestId& t : failing)
                if (cov.exec(l, t) > 0)
                    ++counts.covered_failing;
            for (const TestId& t : passing)
                if (cov.exec(l, t) > 0)
                    ++counts.covered_passing;
            spectrum.lines.push_back(std::move(counts));
        }
    };
    add_lines(change.deletions, cov_v1);
    add_lines(change.additions, cov_v2);
    return spectrum;
}

SuspiciousnessRanking tarantula_scores(const Spectrum& spectrum) {
    if (spectrum.failing_total < 1)
        throw NoFailingTests();

    SuspiciousnessRanking ranking;
    for (const Spectrum::LineCounts& counts : spectrum.lines) {
        RankedLine entry;
        entry.line = counts.line;
        const double fail_ratio =
            static_cast<double>(counts.covered_failing) / spectrum.failing_total;
        const double pass_ratio =
            spectrum.passing_total > 0
                ? static_cast<double>(counts.covered_passing) / spectrum.passing_total
                : 0.0;
        entry.score = (fail_ratio + pass_ratio) > 0.0 ? fail_ratio / (fail_ratio + pass_ratio) : 0.0;
        ranking.entries.push_back(std::move(entry));
    }

    std::stable_sort(ranking.entries.begin(), ranking.entries.end(),
                     [](const RankedLine& a, const RankedLine& b) {
                         if (a.score != b.score)
                             return a.score > b.score;
                         return std::tie(a.line.file, a.line.line, a.line.version) <
                                std::tie(b.line.file, b.line.line, b.line.version);
                     });
    return ranking;
}

json ranking_to_json(const SuspiciousnessRanking& ranking) {
    json out = json::array();
    for (const RankedLine& e : ranking.entries)
        out.push_back(json{{"file", e.line.file},
                           {"line", e.line.line},
                           {"version", to_string(e.line.version)},
                           {"score", e.score}});
    return out;
}

SuspiciousnessRanking ranking_from_json(const json& j) {
    SuspiciousnessRanking ranking;
    try {
        for (const json& e : j) {
            RankedLine entry;
            entry.line.file = e.at("file").get<std::string>();
            entry.line.line = e.at("line").get<int>();
            entry.line.version = version_from_string(e.at("version").get<std::string>());
            entry.score = e.at("score").get<double>();
            ranking.entries.push_back(std::move(entry));
        }
    } catch (const json::exception& e) {
        throw ParseError(ParseError::Kind::Schema, std::string("bad ranking: ") + e.what());
    }
    return ranking;
}

} // namespace edelta
