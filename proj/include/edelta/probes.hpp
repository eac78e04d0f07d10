#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>

#include "edelta/core.hpp"

namespace edelta {

struct ProbeUnavailable : Error {
    MetricKind metric;

    ProbeUnavailable(MetricKind m, const std::string& why)
        : Error(std::string("probe unavailable for ") + metric_name(m) + ": " + why), metric(m) {}
};

struct ProbeReadError : Error {
    using Error::Error;
};

// Deterministic probe for desk-scale experiments. Measurements are
// base * (1 + u) with u drawn from a counter-based generator keyed by
// (seed, test, version, iteration, metric), u ~ Uniform(-noise_rel, +noise_rel).
// The burn-loop counter advances read_quantum_uj per read, noise-free.
struct SimulatedProbeSpec {
    std::uint64_t seed = 0;
    std::map<TestId, std::map<MetricKind, double>> per_test_base;
    double noise_rel = 0.0; // must be < 1
    double read_quantum_uj = 10.0;

    // Lookup order: "<test>@<version>" then "<test>"; missing metrics read 0.
    const std::map<MetricKind, double>* base_for(const TestId& test, Version v) const;

    static SimulatedProbeSpec from_json(const json& j);
    json to_json() const;
    static SimulatedProbeSpec load(const std::filesystem::path& path);
};

double simulated_noise_factor(const SimulatedProbeSpec& spec, const TestId& test, Version v,
                              int iteration, MetricKind metric);

enum class PerfAdapter { OsPerfInterface, ExternalPerfCommand, Disabled };

const char* to_string(PerfAdapter a);
PerfAdapter perf_adapter_from_string(std::string_view s);

struct ProbeConfig {
    std::set<MetricKind> enabled_metrics = {MetricKind::EnergyPkg, MetricKind::DurationSeconds};
    std::filesystem::path powercap_root = "/sys/class/powercap";
    PerfAdapter perf_adapter = PerfAdapter::Disabled;
    // Template for the external adapter; placeholders {events}, {output}, {cmd}.
    std::string perf_command = "perf stat -x, -e {events} -o {output} -- /bin/sh -c {cmd}";
    std::optional<SimulatedProbeSpec> simulated;

    static ProbeConfig from_json(const json& j);
    json to_json() const;
};

// Which test execution a session brackets; the simulated probe keys its
// values off this.
struct MeasureContext {
    TestId test = "adhoc";
    Version version = Version::V1;
    int iteration = 0;
};

// One measurement bracket. Hardware energy counters are machine-global, so
// at most one hardware session may be active per machine (advisory lock).
class ProbeSession {
public:
    ProbeSession(ProbeSession&&) noexcept;
    ProbeSession& operator=(ProbeSession&&) noexcept;
    ~ProbeSession();

    // Identity wrapper except under the external perf adapter, which wraps
    // the command so the counters cover exactly the test subprocess.
    std::string wrap_command(const std::string& cmd);

    // End the bracket: end - start per enabled metric, energy corrected for
    // counter wraparound. Never returns a partial result.
    std::map<MetricKind, double> stop();

    // Cumulative energy since session start in microjoules; monotone
    // non-decreasing across calls (wrap-corrected).
    double read_current_energy_uj();

    const std::string& probe_id() const;

    struct Impl;

private:
    friend ProbeSession start_probe(const ProbeConfig&, const MeasureContext&);
    explicit ProbeSession(std::unique_ptr<Impl> impl);
    std::unique_ptr<Impl> impl_;
};

ProbeSession start_probe(const ProbeConfig& config, const MeasureContext& ctx = {});

inline std::map<MetricKind, double> stop_probe(ProbeSession& session) { return session.stop(); }
inline double read_current_energy(ProbeSession& session) { return session.read_current_energy_uj(); }

// Wraparound rule for cumulative microjoule counters:
// end >= start -> end - start, otherwise (max_range - start) + end.
std::uint64_t wrap_corrected_delta(std::uint64_t start_uj, std::uint64_t end_uj,
                                   std::uint64_t max_range_uj);

// Parse one line of `perf stat -x,` CSV output: value, unit, event-name.
struct PerfCsvRow {
    std::string value;
    std::string unit;
    std::string event;
};
std::optional<PerfCsvRow> parse_perf_csv_line(std::string_view line);
std::optional<MetricKind> metric_from_perf_event(std::string_view event);
const char* perf_event_for(MetricKind m);

} // namespace edelta
