#include "edelta/core.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace edelta {

const char* to_string(Version v) {
    return v == Version::V1 ? "v1" : "v2";
}

Version version_from_string(std::string_view s) {
    if (s == "v1")
        return Version::V1;
    if (s == "v2")
        return Version::V2;
    throw ParseError(ParseError::Kind::Schema, "invalid version tag: " + std::string(s));
}

std::string to_string(const LineRef& l) {
    return l.file + ":" + std::to_string(l.line) + "@" + to_string(l.version);
}

const char* metric_name(MetricKind m) {
    switch (m) {
    case MetricKind::EnergyPkg: return "energy_pkg_uj";
    case MetricKind::EnergyDram: return "energy_dram_uj";
    case MetricKind::DurationSeconds: return "duration_s";
    case MetricKind::Instructions: return "instructions";
    case MetricKind::Cycles: return "cycles";
    case MetricKind::CacheReferences: return "cache_references";
    case MetricKind::CacheMisses: return "cache_misses";
    case MetricKind::Branches: return "branches";
    case MetricKind::BranchMisses: return "branch_misses";
    }
    return "unknown";
}

std::optional<MetricKind> metric_from_name(std::string_view name) {
    for (MetricKind m : all_metrics())
        if (name == metric_name(m))
            return m;
    return std::nullopt;
}

const char* metric_unit(MetricKind m) {
    switch (m) {
    case MetricKind::EnergyPkg:
    case MetricKind::EnergyDram:
        return "uJ";
    case MetricKind::DurationSeconds:
        return "s";
    default:
        return "count";
    }
}

int CoverageMap::exec(const std::string& file, int line, const TestId& test) const {
    auto t = tests.find(test);
    if (t == tests.end())
        return 0;
    auto e = t->second.find(FileLine{file, line});
    return e == t->second.end() ? 0 : e->second;
}

bool CoverageMap::covers(const std::string& file, const TestId& test) const {
    auto t = tests.find(test);
    if (t == tests.end())
        return false;
    // FileLine ordering is (file, line); scan the file's range.
    auto it = t->second.lower_bound(FileLine{file, 0});
    return it != t->second.end() && it->first.file == file;
}

std::string normalize_path(std::string_view path) {
    std::string p(path);
    for (char& c : p)
        if (c == '\\')
            c = '/';

    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= p.size()) {
        std::size_t end = p.find('/', start);
        if (end == std::string::npos)
            end = p.size();
        std::string seg = p.substr(start, end - start);
        if (seg == "..") {
            if (parts.empty())
                throw Error("path escapes its root: " + std::string(path));
            parts.pop_back();
        } else if (!seg.empty() && seg != ".") {
            parts.push_back(seg);
        }
        start = end + 1;
    }
    if (parts.empty())
        throw Error("empty path after normalization: " + std::string(path));

    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i)
            out += '/';
        out += parts[i];
    }
    return out;
}

std::string canonical_dump(const json& j) {
    return j.dump(2) + "\n";
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write file: " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
        throw IoError("short write: " + path.string());
}

CoverageMap coverage_from_json(const json& j) {
    if (!j.is_object())
        throw ParseError(ParseError::Kind::Schema, "coverage root must be an object");
    if (!j.contains("version") || !j["version"].is_string())
        throw ParseError(ParseError::Kind::Schema, "coverage needs a \"version\" string");
    if (!j.contains("tests") || !j["tests"].is_object())
        throw ParseError(ParseError::Kind::Schema, "coverage needs a \"tests\" object");

    CoverageMap cov;
    cov.version = version_from_string(j["version"].get<std::string>());

    for (const auto& [test_id, files] : j["tests"].items()) {
        if (test_id.empty())
            throw ParseError(ParseError::Kind::Schema, "empty test id");
        if (!files.is_object())
            throw ParseError(ParseError::Kind::Schema, "test entry must map files to lines: " + test_id);
        std::map<FileLine, int> lines;
        for (const auto& [file, hits] : files.items()) {
            if (!hits.is_object())
                throw ParseError(ParseError::Kind::Schema, "file entry must map lines to counts: " + file);
            const std::string norm = normalize_path(file);
            for (const auto& [line_str, count] : hits.items()) {
                int line = 0;
                try {
                    std::size_t pos = 0;
                    line = std::stoi(line_str, &pos);
                    if (pos != line_str.size())
                        throw std::invalid_argument(line_str);
                } catch (const std::exception&) {
                    throw ParseError(ParseError::Kind::Schema, "line number is not an integer: " + line_str);
                }
                if (line < 1)
                    throw ParseError(ParseError::Kind::Schema, "line numbers are 1-based: " + line_str);
                if (!count.is_number_integer() || count.get<long long>() < 1)
                    throw ParseError(ParseError::Kind::Schema,
                                     "execution count must be an integer >= 1 at " + file + ":" + line_str);
                lines[FileLine{norm, line}] = count.get<int>();
            }
        }
        cov.tests[test_id] = std::move(lines);
    }

    if (j.contains("test_locations")) {
        if (!j["test_locations"].is_object())
            throw ParseError(ParseError::Kind::Schema, "\"test_locations\" must be an object");
        for (const auto& [test_id, file] : j["test_locations"].items()) {
            if (!file.is_string())
                throw ParseError(ParseError::Kind::Schema, "test location must be a path string: " + test_id);
            cov.test_locations[test_id] = normalize_path(file.get<std::string>());
        }
    }
    return cov;
}

json coverage_to_json(const CoverageMap& cov) {
    json tests = json::object();
    for (const auto& [test_id, lines] : cov.tests) {
        json files = json::object();
        for (const auto& [fl, count] : lines)
            files[fl.file][std::to_string(fl.line)] = count;
        tests[test_id] = std::move(files);
    }
    json j{{"version", to_string(cov.version)}, {"tests", std::move(tests)}};
    if (!cov.test_locations.empty())
        j["test_locations"] = cov.test_locations;
    return j;
}

CoverageMap load_coverage(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec))
        throw ParseError(ParseError::Kind::FileNotFound, "coverage file not found: " + path.string());
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw ParseError(ParseError::Kind::BadJson,
                         "malformed coverage JSON in " + path.string() + ": " + e.what());
    }
    return coverage_from_json(j);
}

void save_coverage(const CoverageMap& cov, const std::filesystem::path& path) {
    write_text_file(path, canonical_dump(coverage_to_json(cov)));
}

json record_to_json(const MeasurementRecord& r) {
    json values = json::object();
    for (const auto& [metric, value] : r.values) {
        if (!std::isfinite(value) || value < 0.0)
            throw SerializationError("measurement value must be finite and >= 0: " +
                                     std::string(metric_name(metric)));
        values[metric_name(metric)] = value;
    }
    return json{{"test", r.test},
                {"version", to_string(r.version)},
                {"iteration", r.iteration},
                {"values", std::move(values)},
                {"probe_id", r.probe_id}};
}

MeasurementRecord record_from_json(const json& j) {
    MeasurementRecord r;
    try {
        r.test = j.at("test").get<std::string>();
        r.version = version_from_string(j.at("version").get<std::string>());
        r.iteration = j.at("iteration").get<int>();
        r.probe_id = j.value("probe_id", std::string{});
        for (const auto& [name, value] : j.at("values").items()) {
            auto metric = metric_from_name(name);
            if (!metric)
                throw ParseError(ParseError::Kind::Schema, "unknown metric: " + name);
            r.values[*metric] = value.get<double>();
        }
    } catch (const json::exception& e) {
        throw ParseError(ParseError::Kind::Schema, std::string("bad measurement record: ") + e.what());
    }
    if (r.iteration < 0)
        throw ParseError(ParseError::Kind::Schema, "iteration must be >= 0");
    return r;
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double to_unit_interval(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

} // namespace edelta
