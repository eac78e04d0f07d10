#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "edelta/core.hpp"

namespace edelta {

struct DiffParseError : Error {
    int line_no;

    DiffParseError(int line, const std::string& msg)
        : Error("diff line " + std::to_string(line) + ": " + msg), line_no(line) {}
};

struct VersionMismatch : Error {
    using Error::Error;
};

// Two-sided view of a commit: deleted lines anchored in v1, added lines in
// v2. Renames count as a content change of both paths; binary hunks are
// skipped with a warning.
struct ChangeSet {
    std::set<LineRef> deletions;   // version == V1
    std::set<LineRef> additions;   // version == V2
    std::set<std::string> touched_files;
    std::vector<std::string> warnings;

    bool empty() const { return deletions.empty() && additions.empty(); }
};

// Tests covering the changed lines, minus the tests the diff itself touches.
// Invariant: selected == (from_v1 | from_v2) \ discarded_modified.
struct TestSelection {
    std::set<TestId> selected;
    std::set<TestId> discarded_modified;
    std::set<TestId> from_v1;
    std::set<TestId> from_v2;
    bool no_covering_tests = false;
};

ChangeSet parse_unified_diff(std::string_view text);

// from_v1 = tests executing a deleted line (per v1 coverage), from_v2 = tests
// executing an added line (per v2 coverage). A test is discarded as modified
// when the diff touches a file of `test_files` that defines it; the defining
// file comes from the coverage maps' test_locations extension, falling back
// to "the test covers lines of that test file".
TestSelection select_tests(const ChangeSet& change, const CoverageMap& cov_v1,
                           const CoverageMap& cov_v2, const std::set<std::string>& test_files);

json selection_to_json(const TestSelection& sel);
TestSelection selection_from_json(const json& j);

// Shell-style glob with "*", "?" and "**" (crosses directory separators);
// used to pick test files out of the diff's touched paths.
bool glob_match(std::string_view pattern, std::string_view path);

std::set<std::string> match_test_files(const std::set<std::string>& touched,
                                       const std::vector<std::string>& globs);

} // namespace edelta
