#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include <json.hpp>

#include "edelta/errors.hpp"

namespace edelta {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Domain vocabulary shared by every pipeline stage. All values are immutable
// after construction and safe to share across threads.
// ---------------------------------------------------------------------------

// v1 = program before the code changes, v2 = program after.
enum class Version { V1, V2 };

const char* to_string(Version v);
Version version_from_string(std::string_view s);

// Opaque stable test identity, e.g. "suiteName#testName". Must match across
// versions.
using TestId = std::string;

// A source line anchored in one version: deletions live in v1 coordinates,
// additions in v2 coordinates.
struct LineRef {
    std::string file;      // normalized relative path, forward slashes
    int line = 0;          // 1-based
    Version version = Version::V1;

    auto operator<=>(const LineRef&) const = default;
};

std::string to_string(const LineRef& l);

// The monitored variables: package/DRAM energy, wall-clock duration, and the
// six hardware performance counters.
enum class MetricKind {
    EnergyPkg,
    EnergyDram,
    DurationSeconds,
    Instructions,
    Cycles,
    CacheReferences,
    CacheMisses,
    Branches,
    BranchMisses,
};

constexpr std::array<MetricKind, 9> all_metrics() {
    return {MetricKind::EnergyPkg,       MetricKind::EnergyDram,  MetricKind::DurationSeconds,
            MetricKind::Instructions,    MetricKind::Cycles,      MetricKind::CacheReferences,
            MetricKind::CacheMisses,     MetricKind::Branches,    MetricKind::BranchMisses};
}

// JSON field names, e.g. "energy_pkg_uj", "duration_s", "instructions".
const char* metric_name(MetricKind m);
std::optional<MetricKind> metric_from_name(std::string_view name);
// "uJ", "s" or "count".
const char* metric_unit(MetricKind m);

// One probe reading for one test execution on one version.
struct MeasurementRecord {
    TestId test;
    Version version = Version::V1;
    int iteration = 0;
    std::map<MetricKind, double> values;
    std::string probe_id;

    bool operator==(const MeasurementRecord&) const = default;
};

struct FileLine {
    std::string file;
    int line = 0;

    auto operator<=>(const FileLine&) const = default;
};

// Per-version line coverage; houses exec(l,t). Zero-count entries are never
// stored, so exec() is total: absent pairs read as 0.
struct CoverageMap {
    Version version = Version::V1;
    std::map<TestId, std::map<FileLine, int>> tests;
    // Optional extension: test id -> file that defines it, used to detect
    // tests modified by the diff.
    std::map<TestId, std::string> test_locations;

    int exec(const std::string& file, int line, const TestId& test) const;
    int exec(const LineRef& l, const TestId& test) const { return exec(l.file, l.line, test); }
    bool covers(const std::string& file, const TestId& test) const;

    bool operator==(const CoverageMap&) const = default;
};

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

struct ParseError : Error {
    enum class Kind { FileNotFound, BadJson, Schema };
    Kind kind;

    ParseError(Kind k, const std::string& msg) : Error(msg), kind(k) {}
};

// Raised when a value that must be finite (a delta, a weight) is NaN or Inf
// at serialization time.
struct SerializationError : Error {
    using Error::Error;
};

// Normalize to forward slashes, strip "./" segments and "a/" style prefixes
// supplied by the caller, resolve "..". Throws Error if the path escapes its
// root or normalizes to nothing.
std::string normalize_path(std::string_view path);

// Canonical JSON for CI artifacts: sorted keys (nlohmann's object order),
// two-space indent, trailing newline. Byte-stable for equal values.
std::string canonical_dump(const json& j);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

// Coverage JSON:
//   {"version": "v1"|"v2",
//    "tests": {"<test_id>": {"<file>": {"<line>": <count >= 1>}}},
//    "test_locations": {"<test_id>": "<file>"}}        (optional)
CoverageMap coverage_from_json(const json& j);
json coverage_to_json(const CoverageMap& cov);
CoverageMap load_coverage(const std::filesystem::path& path);
void save_coverage(const CoverageMap& cov, const std::filesystem::path& path);

json record_to_json(const MeasurementRecord& r);
MeasurementRecord record_from_json(const json& j);

// ---------------------------------------------------------------------------
// Deterministic hashing/noise primitives shared by probes, runner and simlab.
// ---------------------------------------------------------------------------

std::uint64_t fnv1a64(std::string_view data);

// splitmix64 finalizer; also the R() mixing function of the energy burn loop.
std::uint64_t mix64(std::uint64_t x);

// Map a 64-bit word to [0, 1).
double to_unit_interval(std::uint64_t x);

} // namespace edelta
