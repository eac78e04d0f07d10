#include "edelta/probes.hpp"

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

#include <fcntl.h>
#include <linux/perf_event.h>
#include <sys/file.h>
#include <sys/ioctl.h>
#include <sys/syscall.h>
#include <unistd.h>

namespace edelta {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// SimulatedProbeSpec
// ---------------------------------------------------------------------------

const std::map<MetricKind, double>* SimulatedProbeSpec::base_for(const TestId& test,
                                                                 Version v) const {
    auto versioned = per_test_base.find(test + "@" + to_string(v));
    if (versioned != per_test_base.end())
        return &versioned->second;
    auto plain = per_test_base.find(test);
    if (plain != per_test_base.end())
        return &plain->second;
    return nullptr;
}

SimulatedProbeSpec SimulatedProbeSpec::from_json(const json& j) {
    SimulatedProbeSpec spec;
    try {
        spec.seed = j.value("seed", 0ULL);
        spec.noise_rel = j.value("noise_rel", 0.0);
        spec.read_quantum_uj = j.value("read_quantum_uj", 10.0);
        if (j.contains("per_test_base")) {
            for (const auto& [test, metrics] : j.at("per_test_base").items()) {
                std::map<MetricKind, double> base;
                for (const auto& [name, value] : metrics.items()) {
                    auto metric = metric_from_name(name);
                    if (!metric)
                        throw ParseError(ParseError::Kind::Schema,
                                         "unknown metric in simulated spec: " + name);
                    base[*metric] = value.get<double>();
                }
                spec.per_test_base[test] = std::move(base);
            }
        }
    } catch (const json::exception& e) {
        throw ParseError(ParseError::Kind::Schema, std::string("bad simulated probe spec: ") + e.what());
    }
    if (spec.noise_rel < 0.0 || spec.noise_rel >= 1.0)
        throw ParseError(ParseError::Kind::Schema, "noise_rel must be in [0, 1)");
    if (spec.read_quantum_uj <= 0.0)
        throw ParseError(ParseError::Kind::Schema, "read_quantum_uj must be > 0");
    for (const auto& [test, base] : spec.per_test_base)
        for (const auto& [metric, value] : base)
            if (!(value >= 0.0) || !std::isfinite(value))
                throw ParseError(ParseError::Kind::Schema,
                                 "base value must be finite and >= 0 for " + test + "/" +
                                     metric_name(metric));
    return spec;
}

json SimulatedProbeSpec::to_json() const {
    json bases = json::object();
    for (const auto& [test, base] : per_test_base) {
        json metrics = json::object();
        for (const auto& [metric, value] : base)
            metrics[metric_name(metric)] = value;
        bases[test] = std::move(metrics);
    }
    return json{{"seed", seed},
                {"noise_rel", noise_rel},
                {"read_quantum_uj", read_quantum_uj},
                {"per_test_base", std::move(bases)}};
}

SimulatedProbeSpec SimulatedProbeSpec::load(const fs::path& path) {
    if (!fs::exists(path))
        throw ParseError(ParseError::Kind::FileNotFound, "simulated spec not found: " + path.string());
    try {
        return from_json(json::parse(read_text_file(path)));
    } catch (const json::parse_error& e) {
        throw ParseError(ParseError::Kind::BadJson,
                         "malformed simulated spec " + path.string() + ": " + e.what());
    }
}

double simulated_noise_factor(const SimulatedProbeSpec& spec, const TestId& test, Version v,
                              int iteration, MetricKind metric) {
    if (spec.noise_rel == 0.0)
        return 1.0;
    const std::string key = test + "|" + to_string(v) + "|" + std::to_string(iteration) + "|" +
                            metric_name(metric);
    const std::uint64_t word = mix64(spec.seed ^ fnv1a64(key));
    const double u = (to_unit_interval(word) * 2.0 - 1.0) * spec.noise_rel;
    return 1.0 + u;
}

// ---------------------------------------------------------------------------
// ProbeConfig
// ---------------------------------------------------------------------------

const char* to_string(PerfAdapter a) {
    switch (a) {
    case PerfAdapter::OsPerfInterface: return "os";
    case PerfAdapter::ExternalPerfCommand: return "cmd";
    case PerfAdapter::Disabled: return "off";
    }
    return "off";
}

PerfAdapter perf_adapter_from_string(std::string_view s) {
    if (s == "os")
        return PerfAdapter::OsPerfInterface;
    if (s == "cmd")
        return PerfAdapter::ExternalPerfCommand;
    if (s == "off")
        return PerfAdapter::Disabled;
    throw ParseError(ParseError::Kind::Schema, "unknown perf adapter: " + std::string(s));
}

ProbeConfig ProbeConfig::from_json(const json& j) {
    ProbeConfig config;
    try {
        if (j.contains("metrics")) {
            config.enabled_metrics.clear();
            for (const auto& name : j.at("metrics")) {
                auto metric = metric_from_name(name.get<std::string>());
                if (!metric)
                    throw ParseError(ParseError::Kind::Schema,
                                     "unknown metric: " + name.get<std::string>());
                config.enabled_metrics.insert(*metric);
            }
        }
        if (j.contains("powercap_root"))
            config.powercap_root = j.at("powercap_root").get<std::string>();
        if (j.contains("perf_adapter"))
            config.perf_adapter = perf_adapter_from_string(j.at("perf_adapter").get<std::string>());
        if (j.contains("perf_command"))
            config.perf_command = j.at("perf_command").get<std::string>();
        if (j.contains("simulated")) {
            const json& sim = j.at("simulated");
            config.simulated = sim.is_string() ? SimulatedProbeSpec::load(sim.get<std::string>())
                                               : SimulatedProbeSpec::from_json(sim);
        }
    } catch (const json::exception& e) {
        throw ParseError(ParseError::Kind::Schema, std::string("bad probe config: ") + e.what());
    }
    if (config.enabled_metrics.empty())
        throw ParseError(ParseError::Kind::Schema, "probe config enables no metrics");
    return config;
}

json ProbeConfig::to_json() const {
    json metrics = json::array();
    for (MetricKind m : enabled_metrics)
        metrics.push_back(metric_name(m));
    json j{{"metrics", std::move(metrics)},
           {"powercap_root", powercap_root.string()},
           {"perf_adapter", std::string(to_string(perf_adapter))},
           {"perf_command", perf_command}};
    if (simulated)
        j["simulated"] = simulated->to_json();
    return j;
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

std::uint64_t wrap_corrected_delta(std::uint64_t start_uj, std::uint64_t end_uj,
                                   std::uint64_t max_range_uj) {
    if (end_uj >= start_uj)
        return end_uj - start_uj;
    return (max_range_uj - start_uj) + end_uj;
}

std::optional<PerfCsvRow> parse_perf_csv_line(std::string_view line) {
    if (line.empty() || line.front() == '#')
        return std::nullopt;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (start <= line.size()) {
        std::size_t end = line.find(',', start);
        if (end == std::string_view::npos)
            end = line.size();
        fields.emplace_back(line.substr(start, end - start));
        start = end + 1;
    }
    if (fields.size() < 3 || fields[0].empty())
        return std::nullopt;
    return PerfCsvRow{fields[0], fields[1], fields[2]};
}

std::optional<MetricKind> metric_from_perf_event(std::string_view event) {
    // perf may suffix events with :u / :k modifiers.
    std::size_t colon = event.find(':');
    if (colon != std::string_view::npos)
        event = event.substr(0, colon);
    if (event == "instructions")
        return MetricKind::Instructions;
    if (event == "cycles" || event == "cpu-cycles")
        return MetricKind::Cycles;
    if (event == "cache-references")
        return MetricKind::CacheReferences;
    if (event == "cache-misses")
        return MetricKind::CacheMisses;
    if (event == "branches" || event == "branch-instructions")
        return MetricKind::Branches;
    if (event == "branch-misses")
        return MetricKind::BranchMisses;
    return std::nullopt;
}

const char* perf_event_for(MetricKind m) {
    switch (m) {
    case MetricKind::Instructions: return "instructions";
    case MetricKind::Cycles: return "cycles";
    case MetricKind::CacheReferences: return "cache-references";
    case MetricKind::CacheMisses: return "cache-misses";
    case MetricKind::Branches: return "branches";
    case MetricKind::BranchMisses: return "branch-misses";
    default: return nullptr;
    }
}

namespace {

bool is_counter_metric(MetricKind m) {
    return perf_event_for(m) != nullptr;
}

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    out += "'";
    return out;
}

std::string replace_all(std::string text, std::string_view placeholder, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = text.find(placeholder, pos)) != std::string::npos) {
        text.replace(pos, placeholder.size(), value);
        pos += value.size();
    }
    return text;
}

std::uint64_t read_u64_file(const fs::path& path) {
    std::ifstream in(path);
    std::uint64_t value = 0;
    if (!in || !(in >> value))
        throw ProbeReadError("cannot read counter file: " + path.string());
    return value;
}

std::string read_trimmed(const fs::path& path) {
    std::string text = read_text_file(path);
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r' || text.back() == ' '))
        text.pop_back();
    return text;
}

fs::path probe_lock_path() {
    if (const char* override_path = std::getenv("EDELTA_PROBE_LOCK"))
        return override_path;
    return fs::temp_directory_path() / "edelta-probe.lock";
}

// Machine-global energy counters: one active hardware session at a time.
struct AdvisoryLock {
    int fd = -1;

    void acquire() {
        const fs::path path = probe_lock_path();
        fd = ::open(path.c_str(), O_CREAT | O_RDWR, 0666);
        if (fd < 0)
            throw ProbeReadError("cannot open probe lock " + path.string() + ": " +
                                 std::strerror(errno));
        if (::flock(fd, LOCK_EX | LOCK_NB) != 0) {
            ::close(fd);
            fd = -1;
            throw ProbeUnavailable(MetricKind::EnergyPkg,
                                   "another measurement session holds the probe lock");
        }
    }

    void release() {
        if (fd >= 0) {
            ::flock(fd, LOCK_UN);
            ::close(fd);
            fd = -1;
        }
    }

    ~AdvisoryLock() { release(); }
};

enum class EnergyDomain { Package, Dram };

struct EnergyCounter {
    fs::path energy_file;
    EnergyDomain domain;
    std::uint64_t max_range = 0;
    std::uint64_t baseline_raw = 0;
    std::uint64_t last_raw = 0;
    std::uint64_t wrap_offset = 0;

    std::uint64_t read_raw() {
        const std::uint64_t raw = read_u64_file(energy_file);
        if (raw > max_range)
            throw ProbeReadError("energy_uj exceeds max_energy_range_uj in " + energy_file.string());
        return raw;
    }

    // Cumulative microjoules since baseline, accounting for wraps seen so far.
    std::uint64_t advance() {
        const std::uint64_t raw = read_raw();
        if (raw < last_raw)
            wrap_offset += max_range;
        last_raw = raw;
        return wrap_offset + raw - baseline_raw;
    }
};

std::vector<EnergyCounter> scan_powercap(const fs::path& root) {
    std::vector<EnergyCounter> counters;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(root, ec)) {
        const fs::path name_file = entry.path() / "name";
        if (!fs::exists(name_file, ec))
            continue;
        const std::string name = read_trimmed(name_file);
        EnergyDomain domain;
        if (name.rfind("package", 0) == 0)
            domain = EnergyDomain::Package;
        else if (name == "dram")
            domain = EnergyDomain::Dram;
        else
            continue;
        const fs::path energy = entry.path() / "energy_uj";
        const fs::path max_range = entry.path() / "max_energy_range_uj";
        if (!fs::exists(energy, ec) || !fs::exists(max_range, ec))
            continue;
        EnergyCounter counter;
        counter.energy_file = energy;
        counter.domain = domain;
        counter.max_range = read_u64_file(max_range);
        counters.push_back(std::move(counter));
    }
    return counters;
}

long sys_perf_event_open(perf_event_attr* attr, pid_t pid, int cpu, int group_fd,
                         unsigned long flags) {
    return syscall(__NR_perf_event_open, attr, pid, cpu, group_fd, flags);
}

std::uint32_t perf_hw_config(MetricKind m) {
    switch (m) {
    case MetricKind::Instructions: return PERF_COUNT_HW_INSTRUCTIONS;
    case MetricKind::Cycles: return PERF_COUNT_HW_CPU_CYCLES;
    case MetricKind::CacheReferences: return PERF_COUNT_HW_CACHE_REFERENCES;
    case MetricKind::CacheMisses: return PERF_COUNT_HW_CACHE_MISSES;
    case MetricKind::Branches: return PERF_COUNT_HW_BRANCH_INSTRUCTIONS;
    case MetricKind::BranchMisses: return PERF_COUNT_HW_BRANCH_MISSES;
    default: throw ProbeReadError("not a hardware counter metric");
    }
}

struct PerfFdCounter {
    MetricKind metric;
    int fd = -1;
    std::uint64_t base_value = 0;
    std::uint64_t base_enabled = 0;
    std::uint64_t base_running = 0;
};

struct PerfReading {
    std::uint64_t value;
    std::uint64_t enabled;
    std::uint64_t running;
};

PerfReading read_perf_fd(int fd) {
    PerfReading r{};
    if (::read(fd, &r, sizeof(r)) != static_cast<ssize_t>(sizeof(r)))
        throw ProbeReadError(std::string("perf counter read failed: ") + std::strerror(errno));
    return r;
}

} // namespace

// ---------------------------------------------------------------------------
// ProbeSession
// ---------------------------------------------------------------------------

struct ProbeSession::Impl {
    std::string probe_id;
    bool stopped = false;

    virtual ~Impl() = default;
    virtual std::map<MetricKind, double> do_stop() = 0;
    virtual double do_read_energy() = 0;
    virtual std::string do_wrap(const std::string& cmd) { return cmd; }
};

namespace {

struct SimulatedSession : ProbeSession::Impl {
    SimulatedProbeSpec spec;
    std::set<MetricKind> enabled;
    MeasureContext ctx;
    std::uint64_t reads = 0;

    std::map<MetricKind, double> do_stop() override {
        std::map<MetricKind, double> values;
        const std::map<MetricKind, double>* base = spec.base_for(ctx.test, ctx.version);
        for (MetricKind m : enabled) {
            double v = 0.0;
            if (base) {
                auto it = base->find(m);
                if (it != base->end())
                    v = it->second;
            }
            if (m == MetricKind::DurationSeconds && v == 0.0)
                v = 1e-9; // executed tests always take time
            values[m] = v * simulated_noise_factor(spec, ctx.test, ctx.version, ctx.iteration, m);
        }
        return values;
    }

    double do_read_energy() override {
        ++reads;
        return static_cast<double>(reads) * spec.read_quantum_uj;
    }
};

struct HardwareSession : ProbeSession::Impl {
    std::set<MetricKind> enabled;
    AdvisoryLock lock;
    std::vector<EnergyCounter> energy_counters;
    std::vector<PerfFdCounter> perf_fds;
    PerfAdapter adapter = PerfAdapter::Disabled;
    std::string perf_command;
    fs::path perf_output;
    bool command_wrapped = false;
    std::chrono::steady_clock::time_point t_start;

    ~HardwareSession() override {
        for (PerfFdCounter& c : perf_fds)
            if (c.fd >= 0)
                ::close(c.fd);
        if (!perf_output.empty()) {
            std::error_code ec;
            fs::remove(perf_output, ec);
        }
    }

    std::string do_wrap(const std::string& cmd) override {
        if (adapter != PerfAdapter::ExternalPerfCommand)
            return cmd;
        std::string events;
        for (MetricKind m : enabled)
            if (const char* name = perf_event_for(m)) {
                if (!events.empty())
                    events += ",";
                events += name;
            }
        std::string wrapped = perf_command;
        wrapped = replace_all(wrapped, "{events}", events);
        wrapped = replace_all(wrapped, "{output}", perf_output.string());
        wrapped = replace_all(wrapped, "{cmd}", shell_quote(cmd));
        command_wrapped = true;
        return wrapped;
    }

    std::map<MetricKind, double> do_stop() override {
        std::map<MetricKind, double> values;

        // Sample the volatile counters first.
        std::map<EnergyDomain, double> energy{{EnergyDomain::Package, 0.0},
                                              {EnergyDomain::Dram, 0.0}};
        for (EnergyCounter& c : energy_counters)
            energy[c.domain] += static_cast<double>(c.advance());
        const auto t_end = std::chrono::steady_clock::now();

        if (enabled.count(MetricKind::EnergyPkg))
            values[MetricKind::EnergyPkg] = energy[EnergyDomain::Package];
        if (enabled.count(MetricKind::EnergyDram))
            values[MetricKind::EnergyDram] = energy[EnergyDomain::Dram];
        if (enabled.count(MetricKind::DurationSeconds))
            values[MetricKind::DurationSeconds] =
                std::chrono::duration<double>(t_end - t_start).count();

        if (adapter == PerfAdapter::OsPerfInterface) {
            for (PerfFdCounter& c : perf_fds) {
                const PerfReading now = read_perf_fd(c.fd);
                const double delta = static_cast<double>(now.value - c.base_value);
                const double enabled_d = static_cast<double>(now.enabled - c.base_enabled);
                const double running_d = static_cast<double>(now.running - c.base_running);
                // Scale for counter multiplexing.
                const double scale = (running_d > 0.0 && enabled_d > 0.0) ? enabled_d / running_d : 1.0;
                values[c.metric] = delta * scale;
            }
        } else if (adapter == PerfAdapter::ExternalPerfCommand) {
            if (!command_wrapped)
                throw ProbeReadError("external perf adapter: wrap_command was never applied");
            values.merge(parse_perf_output());
        }

        for (MetricKind m : enabled)
            if (!values.count(m))
                throw ProbeReadError(std::string("no value produced for enabled metric ") +
                                     metric_name(m));
        return values;
    }

    std::map<MetricKind, double> parse_perf_output() {
        if (!fs::exists(perf_output))
            throw ProbeReadError("perf output missing: " + perf_output.string());
        std::map<MetricKind, double> values;
        std::ifstream in(perf_output);
        std::string line;
        while (std::getline(in, line)) {
            auto row = parse_perf_csv_line(line);
            if (!row)
                continue;
            auto metric = metric_from_perf_event(row->event);
            if (!metric || !enabled.count(*metric))
                continue;
            if (row->value.find("<not") != std::string::npos)
                throw ProbeReadError("perf did not count event " + row->event);
            try {
                values[*metric] = std::stod(row->value);
            } catch (const std::exception&) {
                throw ProbeReadError("unparseable perf value '" + row->value + "' for " + row->event);
            }
        }
        for (MetricKind m : enabled)
            if (is_counter_metric(m) && !values.count(m))
                throw ProbeReadError(std::string("perf output lacks enabled counter ") +
                                     metric_name(m));
        return values;
    }

    double do_read_energy() override {
        if (energy_counters.empty())
            throw ProbeReadError("session has no energy counters");
        double total = 0.0;
        for (EnergyCounter& c : energy_counters)
            total += static_cast<double>(c.advance());
        return total;
    }
};

} // namespace

ProbeSession::ProbeSession(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
ProbeSession::ProbeSession(ProbeSession&&) noexcept = default;
ProbeSession& ProbeSession::operator=(ProbeSession&&) noexcept = default;
ProbeSession::~ProbeSession() = default;

std::string ProbeSession::wrap_command(const std::string& cmd) {
    if (!impl_ || impl_->stopped)
        throw ProbeReadError("probe session is not active");
    return impl_->do_wrap(cmd);
}

std::map<MetricKind, double> ProbeSession::stop() {
    if (!impl_ || impl_->stopped)
        throw ProbeReadError("probe session already stopped");
    impl_->stopped = true;
    return impl_->do_stop();
}

double ProbeSession::read_current_energy_uj() {
    if (!impl_ || impl_->stopped)
        throw ProbeReadError("probe session is not active");
    return impl_->do_read_energy();
}

const std::string& ProbeSession::probe_id() const {
    static const std::string none = "none";
    return impl_ ? impl_->probe_id : none;
}

ProbeSession start_probe(const ProbeConfig& config, const MeasureContext& ctx) {
    if (config.enabled_metrics.empty())
        throw ProbeUnavailable(MetricKind::DurationSeconds, "no metrics enabled");

    if (config.simulated) {
        auto session = std::make_unique<SimulatedSession>();
        session->spec = *config.simulated;
        session->enabled = config.enabled_metrics;
        session->ctx = ctx;
        session->probe_id = "sim:seed=" + std::to_string(config.simulated->seed);
        return ProbeSession(std::move(session));
    }

    auto session = std::make_unique<HardwareSession>();
    session->enabled = config.enabled_metrics;
    session->adapter = config.perf_adapter;
    session->perf_command = config.perf_command;

    const bool wants_pkg = config.enabled_metrics.count(MetricKind::EnergyPkg) > 0;
    const bool wants_dram = config.enabled_metrics.count(MetricKind::EnergyDram) > 0;
    const bool wants_energy = wants_pkg || wants_dram;

    std::vector<MetricKind> counter_metrics;
    for (MetricKind m : config.enabled_metrics)
        if (is_counter_metric(m))
            counter_metrics.push_back(m);
    if (!counter_metrics.empty() && config.perf_adapter == PerfAdapter::Disabled)
        throw ProbeUnavailable(counter_metrics.front(),
                               "performance counters requested but perf adapter is disabled");

    std::string id = "wallclock";
    if (wants_energy) {
        std::error_code ec;
        if (!fs::is_directory(config.powercap_root, ec))
            throw ProbeUnavailable(wants_pkg ? MetricKind::EnergyPkg : MetricKind::EnergyDram,
                                   "powercap root not readable: " + config.powercap_root.string());
        session->energy_counters = scan_powercap(config.powercap_root);
        const auto has_domain = [&](EnergyDomain d) {
            for (const EnergyCounter& c : session->energy_counters)
                if (c.domain == d)
                    return true;
            return false;
        };
        if (wants_pkg && !has_domain(EnergyDomain::Package))
            throw ProbeUnavailable(MetricKind::EnergyPkg,
                                   "no package domain under " + config.powercap_root.string());
        if (wants_dram && !has_domain(EnergyDomain::Dram))
            throw ProbeUnavailable(MetricKind::EnergyDram,
                                   "no dram domain under " + config.powercap_root.string());
        session->lock.acquire();
        id = "powercap:" + config.powercap_root.string();
    }

    if (!counter_metrics.empty()) {
        if (config.perf_adapter == PerfAdapter::OsPerfInterface) {
            for (MetricKind m : counter_metrics) {
                perf_event_attr attr{};
                attr.size = sizeof(attr);
                attr.type = PERF_TYPE_HARDWARE;
                attr.config = perf_hw_config(m);
                attr.disabled = 0;
                attr.inherit = 1; // count the test subprocess, not just us
                attr.exclude_kernel = 1;
                attr.exclude_hv = 1;
                attr.read_format = PERF_FORMAT_TOTAL_TIME_ENABLED | PERF_FORMAT_TOTAL_TIME_RUNNING;
                const long fd = sys_perf_event_open(&attr, 0, -1, -1, 0);
                if (fd < 0)
                    throw ProbeUnavailable(m, std::string("perf_event_open failed: ") +
                                                  std::strerror(errno));
                PerfFdCounter counter;
                counter.metric = m;
                counter.fd = static_cast<int>(fd);
                session->perf_fds.push_back(counter);
            }
            id += "+perf:os";
        } else {
            char tmpl[] = "/tmp/edelta-perf-XXXXXX";
            const int fd = ::mkstemp(tmpl);
            if (fd < 0)
                throw ProbeReadError(std::string("cannot create perf output file: ") +
                                     std::strerror(errno));
            ::close(fd);
            session->perf_output = tmpl;
            id += "+perf:cmd";
        }
    }
    session->probe_id = id;

    // Baselines last, closest to the measured workload.
    for (PerfFdCounter& c : session->perf_fds) {
        const PerfReading r = read_perf_fd(c.fd);
        c.base_value = r.value;
        c.base_enabled = r.enabled;
        c.base_running = r.running;
    }
    for (EnergyCounter& c : session->energy_counters) {
        c.baseline_raw = c.read_raw();
        c.last_raw = c.baseline_raw;
        c.wrap_offset = 0;
    }
    session->t_start = std::chrono::steady_clock::now();
    return ProbeSession(std::move(session));
}

} // namespace edelta
