#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "edelta/core.hpp"
#include "edelta/probes.hpp"

namespace edelta {

enum class Interleaving { BlockPerVersion, AlternatingPairs };

const char* to_string(Interleaving i);
Interleaving interleaving_from_string(std::string_view s);

struct PlanInvalid : Error {
    using Error::Error;
};

struct TestFailure : Error {
    TestId test;
    Version version;
    int exit_code;

    TestFailure(TestId t, Version v, int code)
        : Error("test '" + t + "' failed on " + to_string(v) + " with exit code " +
                std::to_string(code)),
          test(std::move(t)), version(v), exit_code(code) {}
};

struct RunPlan {
    std::vector<TestId> tests;
    int repetitions = 10;
    std::map<Version, std::filesystem::path> workspaces;
    std::string test_command_template; // must contain {test_id}
    int warmup_runs = 2;
    Interleaving interleaving = Interleaving::AlternatingPairs;
    int settle_ms = 500;
};

void validate_plan(const RunPlan& plan);
std::string plan_digest(const RunPlan& plan);
std::string instantiate_command(const std::string& command_template, const TestId& test);

// The full measurement log of one pipeline run. A successful run holds
// exactly |tests| * repetitions * 2 records, one per (test, version,
// iteration), warmups excluded.
struct MeasurementLog {
    std::vector<MeasurementRecord> records;
    std::string digest;

    std::vector<double> values(const TestId& test, Version v, MetricKind metric) const;
    std::set<TestId> tests() const;
};

// Run `cmd` under /bin/sh in `cwd`; returns the exit code (or -signal when
// killed).
int run_shell(const std::string& cmd, const std::filesystem::path& cwd);

// One unprobed execution of every test on both versions. A non-zero exit
// means a functional regression, which is out of scope for energy verdicts.
void preflight(const RunPlan& plan);

// Repeated probed execution per the plan's interleaving. Strictly
// sequential: energy counters are machine-global.
MeasurementLog execute_plan(const RunPlan& plan, const ProbeConfig& probes);

// JSON Lines, one record per line, preceded by a {"plan_digest": ...} header.
void save_log(const MeasurementLog& log, const std::filesystem::path& path);
MeasurementLog load_log(const std::filesystem::path& path);
std::string log_to_jsonl(const MeasurementLog& log);
MeasurementLog log_from_jsonl(std::string_view text);

} // namespace edelta
