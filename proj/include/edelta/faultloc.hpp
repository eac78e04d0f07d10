#pragma once

#include <map>
#include <set>
#include <utility>
#include <vector>

#include "edelta/core.hpp"
#include "edelta/diff.hpp"

namespace edelta {

struct NoFailingTests : Error {
    NoFailingTests() : Error("no failing tests: suspiciousness ranking is undefined") {}
};

// Binary coverage spectrum over the changed lines. "Failing" tests are those
// whose energy delta is strictly positive.
struct Spectrum {
    struct LineCounts {
        LineRef line;
        int covered_failing = 0; // e_f
        int covered_passing = 0; // e_p
    };

    std::vector<LineCounts> lines;
    int failing_total = 0; // F
    int passing_total = 0; // P
};

struct RankedLine {
    LineRef line;
    double score = 0.0;
};

// Changed lines ordered by non-increasing suspiciousness; ties broken by
// (file, line) ascending.
struct SuspiciousnessRanking {
    std::vector<RankedLine> entries;
};

// failing = {t : delta(t) > 0}, passing = the rest (a zero delta passes).
std::pair<std::set<TestId>, std::set<TestId>> partition_tests(
    const std::map<TestId, double>& deltas);

// Deleted lines read coverage from v1, added lines from v2.
Spectrum build_spectrum(const ChangeSet& change, const std::set<TestId>& failing,
                        const std::set<TestId>& passing, const CoverageMap& cov_v1,
                        const CoverageMap& cov_v2);

// score(l) = (e_f/F) / (e_f/F + e_p/P); e_p/P reads 0 when P == 0, lines
// covered by no test score 0.
SuspiciousnessRanking tarantula_scores(const Spectrum& spectrum);

json ranking_to_json(const SuspiciousnessRanking& ranking);
SuspiciousnessRanking ranking_from_json(const json& j);

} // namespace edelta
