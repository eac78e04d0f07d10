#include "edelta/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <sstream>
#include <thread>

#include <sys/wait.h>

namespace edelta {

const char* to_string(Interleaving i) {
    return i == Interleaving::BlockPerVersion ? "block" : "alternating";
}

Interleaving interleaving_from_string(std::string_view s) {
    if (s == "block")
        return Interleaving::BlockPerVersion;
    if (s == "alternating")
        return Interleaving::AlternatingPairs;
    throw ParseError(ParseError::Kind::Schema, "unknown interleaving: " + std::string(s));
}

void validate_plan(const RunPlan& plan) {
    if (plan.tests.empty())
        throw PlanInvalid("plan has no tests");
    if (plan.repetitions < 1)
        throw PlanInvalid("repetitions must be >= 1");
    if (plan.warmup_runs < 0)
        throw PlanInvalid("warmup_runs must be >= 0");
    if (plan.test_command_template.find("{test_id}") == std::string::npos)
        throw PlanInvalid("test command template lacks the {test_id} placeholder");
    for (Version v : {Version::V1, Version::V2}) {
        auto it = plan.workspaces.find(v);
        if (it == plan.workspaces.end())
            throw PlanInvalid(std::string("no workspace configured for ") + to_string(v));
        std::error_code ec;
        if (!std::filesystem::is_directory(it->second, ec))
            throw PlanInvalid("workspace for " + std::string(to_string(v)) +
                              " is not a directory: " + it->second.string());
    }
    std::set<TestId> seen(plan.tests.begin(), plan.tests.end());
    if (seen.size() != plan.tests.size())
        throw PlanInvalid("duplicate test ids in plan");
}

std::string plan_digest(const RunPlan& plan) {
    json j{{"tests", plan.tests},
           {"repetitions", plan.repetitions},
           {"workspace_v1", plan.workspaces.count(Version::V1)
                                ? plan.workspaces.at(Version::V1).string()
                                : ""},
           {"workspace_v2", plan.workspaces.count(Version::V2)
                                ? plan.workspaces.at(Version::V2).string()
                                : ""},
           {"command", plan.test_command_template},
           {"warmup_runs", plan.warmup_runs},
           {"interleaving", std::string(to_string(plan.interleaving))},
           {"settle_ms", plan.settle_ms}};
    std::ostringstream hex;
    hex << std::hex << fnv1a64(j.dump());
    return hex.str();
}

std::string instantiate_command(const std::string& command_template, const TestId& test) {
    std::string cmd = command_template;
    std::size_t pos = 0;
    while ((pos = cmd.find("{test_id}", pos)) != std::string::npos) {
        cmd.replace(pos, 9, test);
        pos += test.size();
    }
    return cmd;
}

int run_shell(const std::string& cmd, const std::filesystem::path& cwd) {
    std::string quoted_dir = "'";
    for (char c : cwd.string()) {
        if (c == '\'')
            quoted_dir += "'\\''";
        else
            quoted_dir += c;
    }
    quoted_dir += "'";
    // Newline-terminated group so trailing shell comments cannot swallow the
    // closing brace.
    const std::string full = "cd " + quoted_dir + " && {\n" + cmd + "\n}";
    const int status = std::system(full.c_str());
    if (status < 0)
        throw IoError("failed to spawn shell for: " + cmd);
    if (WIFEXITED(status))
        return WEXITSTATUS(status);
    if (WIFSIGNALED(status))
        return -WTERMSIG(status);
    return status;
}

std::vector<double> MeasurementLog::values(const TestId& test, Version v, MetricKind metric) const {
    std::vector<double> out;
    for (const MeasurementRecord& r : records) {
        if (r.test != test || r.version != v)
            continue;
        auto it = r.values.find(metric);
        if (it != r.values.end())
            out.push_back(it->second);
    }
    return out;
}

std::set<TestId> MeasurementLog::tests() const {
    std::set<TestId> out;
    for (const MeasurementRecord& r : records)
        out.insert(r.test);
    return out;
}

void preflight(const RunPlan& plan) {
    validate_plan(plan);
    for (const TestId& test : plan.tests) {
        for (Version v : {Version::V1, Version::V2}) {
            const std::string cmd = instantiate_command(plan.test_command_template, test);
            const int code = run_shell(cmd, plan.workspaces.at(v));
            if (code != 0)
                throw TestFailure(test, v, code);
        }
    }
}

namespace {

struct ScheduledRun {
    TestId test;
    Version version;
    int iteration; // -1 for warmups
};

std::vector<ScheduledRun> build_schedule(const RunPlan& plan) {
    std::vector<ScheduledRun> schedule;
    const auto versions = {Version::V1, Version::V2};
    if (plan.interleaving == Interleaving::AlternatingPairs) {
        for (const TestId& t : plan.tests) {
            for (Version v : versions)
                for (int w = 0; w < plan.warmup_runs; ++w)
                    schedule.push_back({t, v, -1});
            for (int i = 0; i < plan.repetitions; ++i)
                for (Version v : versions)
                    schedule.push_back({t, v, i});
        }
    } else {
        for (Version v : versions) {
            for (const TestId& t : plan.tests) {
                for (int w = 0; w < plan.warmup_runs; ++w)
                    schedule.push_back({t, v, -1});
                for (int i = 0; i < plan.repetitions; ++i)
                    schedule.push_back({t, v, i});
            }
        }
    }
    return schedule;
}

} // namespace

MeasurementLog execute_plan(const RunPlan& plan, const ProbeConfig& probes) {
    preflight(plan);

    MeasurementLog log;
    log.digest = plan_digest(plan);

    bool first_measured = true;
    for (const ScheduledRun& run : build_schedule(plan)) {
        const std::string cmd = instantiate_command(plan.test_command_template, run.test);
        const std::filesystem::path& cwd = plan.workspaces.at(run.version);

        if (run.iteration < 0) {
            // Warmup: unprobed, discarded.
            const int code = run_shell(cmd, cwd);
            if (code != 0)
                throw TestFailure(run.test, run.version, code);
            continue;
        }

        if (!first_measured && plan.settle_ms > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(plan.settle_ms));
        first_measured = false;

        ProbeSession session =
            start_probe(probes, MeasureContext{run.test, run.version, run.iteration});
        const int code = run_shell(session.wrap_command(cmd), cwd);
        if (code != 0)
            throw TestFailure(run.test, run.version, code);

        MeasurementRecord record;
        record.test = run.test;
        record.version = run.version;
        record.iteration = run.iteration;
        record.probe_id = session.probe_id();
        record.values = session.stop();
        log.records.push_back(std::move(record));
    }
    return log;
}

std::string log_to_jsonl(const MeasurementLog& log) {
    std::string out = json{{"plan_digest", log.digest}}.dump() + "\n";
    for (const MeasurementRecord& r : log.records)
        out += record_to_json(r).dump() + "\n";
    return out;
}

MeasurementLog log_from_jsonl(std::string_view text) {
    MeasurementLog log;
    std::size_t start = 0;
    int line_no = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (line.empty())
            continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(ParseError::Kind::BadJson,
                             "log line " + std::to_string(line_no) + ": " + e.what());
        }
        if (j.contains("plan_digest")) {
            log.digest = j["plan_digest"].get<std::string>();
            continue;
        }
        log.records.push_back(record_from_json(j));
    }
    return log;
}

void save_log(const MeasurementLog& log, const std::filesystem::path& path) {
    write_text_file(path, log_to_jsonl(log));
}

MeasurementLog load_log(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path))
        throw ParseError(ParseError::Kind::FileNotFound, "log not found: " + path.string());
    return log_from_jsonl(read_text_file(path));
}

} // namespace edelta
