// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria 6 and 8 drive the CLI named by $EDELTA_CLI.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "edelta/delta.hpp"
#include "edelta/faultloc.hpp"
#include "edelta/mutator.hpp"
#include "edelta/pipeline.hpp"

using namespace edelta;
namespace fs = std::filesystem;

namespace {

struct Checker {
    bool ok = true;
    std::string detail;

    void expect(bool condition, const std::string& what) {
        if (!condition) {
            ok = false;
            if (!detail.empty())
                detail += "; ";
            detail += what;
        }
    }

    void note(const std::string& info) {
        if (detail.empty())
            detail = info;
    }
};

fs::path scratch_dir(const std::string& tag) {
    static int counter = 0;
    fs::path dir = fs::temp_directory_path() /
                   ("edelta-acceptance-" + tag + "-" + std::to_string(::getpid()) + "-" +
                    std::to_string(counter++));
    fs::create_directories(dir);
    return dir;
}

struct CmdResult {
    int exit_code = -1;
    std::string out;
};

CmdResult run_command(const std::string& cmd) {
    CmdResult result;
    FILE* pipe = ::popen((cmd + " 2>/dev/null").c_str(), "r");
    if (!pipe)
        return result;
    char buffer[4096];
    std::size_t n = 0;
    while ((n = ::fread(buffer, 1, sizeof(buffer), pipe)) > 0)
        result.out.append(buffer, n);
    const int status = ::pclose(pipe);
    if (WIFEXITED(status))
        result.exit_code = WEXITSTATUS(status);
    return result;
}

std::string cli_path() {
    const char* cli = std::getenv("EDELTA_CLI");
    return cli ? cli : "";
}

// ---------------------------------------------------------------------------
// Criterion 1: the worked example. Five tests execute l1 once each and gain
// +1 uJ, one test executes l2 once and saves 5 uJ. theta(l1)=5, theta(l2)=1,
// Theta=6 exactly; delta_omega = 10/3 within 1e-9; verdict breaking; the
// unweighted per-test sum is 0.
// ---------------------------------------------------------------------------
void criterion_worked_example(Checker& c) {
    ChangeSet change;
    change.additions.insert({"src/m.c", 1, Version::V2});
    change.additions.insert({"src/m.c", 2, Version::V2});

    TestSelection selection;
    CoverageMap cov_v1, cov_v2;
    cov_v1.version = Version::V1;
    cov_v2.version = Version::V2;
    MeasurementLog log;
    auto add_records = [&](const TestId& t, double v1_uj, double v2_uj) {
        for (int i = 0; i < 3; ++i) {
            MeasurementRecord r1{t, Version::V1, i, {{MetricKind::EnergyPkg, v1_uj}}, "fixed"};
            MeasurementRecord r2{t, Version::V2, i, {{MetricKind::EnergyPkg, v2_uj}}, "fixed"};
            log.records.push_back(r1);
            log.records.push_back(r2);
        }
    };
    for (int i = 1; i <= 5; ++i) {
        const TestId t = "t" + std::to_string(i);
        cov_v1.tests[t][FileLine{"src/m.c", 1}] = 1;
        cov_v2.tests[t][FileLine{"src/m.c", 1}] = 1;
        selection.selected.insert(t);
        add_records(t, 10.0, 11.0); // delta +1
    }
    cov_v1.tests["t6"][FileLine{"src/m.c", 2}] = 1;
    cov_v2.tests["t6"][FileLine{"src/m.c", 2}] = 1;
    selection.selected.insert("t6");
    add_records("t6", 10.0, 5.0); // delta -5

    std::map<TestId, double> deltas;
    double plain_sum = 0.0;
    for (const TestId& t : selection.selected) {
        deltas[t] = per_test_delta(log, t, MetricKind::EnergyPkg, Aggregator::Median).delta;
        plain_sum += deltas[t];
    }

    const std::vector<LineWeight> weights = line_weights(change, selection, cov_v1, cov_v2);
    c.expect(weights.size() == 2, "expected two weighted lines");
    c.expect(weights[0].theta == 5, "theta(l1) != 5");
    c.expect(weights[1].theta == 1, "theta(l2) != 1");
    c.expect(weights[0].theta + weights[1].theta == 6, "Theta != 6");

    WeightedVerdict verdict =
        weighted_delta(deltas, weights, cov_v1, cov_v2, MetricKind::EnergyPkg);
    const Conclusiveness conclusive = commit_conclusiveness(
        per_test_conclusiveness(log, selection.selected, MetricKind::EnergyPkg));
    verdict = classify(std::move(verdict), conclusive, 0.0, true);

    c.expect(std::abs(verdict.delta_omega - 10.0 / 3.0) < 1e-9,
             "delta_omega not within 1e-9 of 10/3");
    c.expect(verdict.breaking, "verdict is not breaking");
    c.expect(plain_sum == 0.0, "unweighted sum is not exactly 0");

    std::ostringstream note;
    note << "theta=5/1 Theta=6 delta_omega=" << verdict.delta_omega
         << " unweighted_sum=" << plain_sum;
    c.note(note.str());
}

// ---------------------------------------------------------------------------
// Criterion 2: statistics oracles at 1e-12 relative plus equivariance over
// 1000 random samples.
// ---------------------------------------------------------------------------
void criterion_statistics(Checker& c) {
    auto close = [](double a, double b) {
        return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
    };
    c.expect(close(population_stddev(std::vector<double>{2, 4, 4, 4, 5, 5, 7, 9}), 2.0),
             "sigma oracle 1");
    c.expect(close(population_stddev(std::vector<double>{0, 10}), 5.0), "sigma oracle 2");
    c.expect(population_stddev(std::vector<double>{5, 5, 5}) == 0.0, "sigma oracle 3");
    c.expect(close(coefficient_of_variation(std::vector<double>{2, 4, 4, 4, 5, 5, 7, 9}), 0.4),
             "cv oracle");
    c.expect(coefficient_of_variation(std::vector<double>{7, 7, 7, 7}) == 0.0, "cv oracle 2");
    c.expect(close(quartile_coefficient_of_dispersion(std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8}),
                   7.0 / 18.0),
             "qcd oracle");
    c.expect(quartile_coefficient_of_dispersion(std::vector<double>{9, 9, 9, 9}) == 0.0,
             "qcd oracle 2");

    std::uint64_t s = 4242;
    for (int i = 0; i < 1000; ++i) {
        const std::size_t n = 2 + mix64(s += 1) % 10;
        std::vector<double> xs(n);
        for (double& x : xs)
            x = 0.5 + to_unit_interval(mix64(s += 1)) * 99.5;
        const double k = 0.1 + to_unit_interval(mix64(s += 1)) * 9.9;
        const double shift = to_unit_interval(mix64(s += 1)) * 100.0 - 50.0;

        std::vector<double> scaled = xs, shifted = xs;
        for (std::size_t j = 0; j < n; ++j) {
            scaled[j] *= k;
            shifted[j] += shift;
        }
        const double sd = population_stddev(xs);
        if (!close(population_stddev(scaled), k * sd)) {
            c.expect(false, "scale equivariance failed at sample " + std::to_string(i));
            return;
        }
        if (std::abs(population_stddev(shifted) - sd) > 1e-9) {
            c.expect(false, "translation invariance failed at sample " + std::to_string(i));
            return;
        }
        if (!close(coefficient_of_variation(scaled), coefficient_of_variation(xs))) {
            c.expect(false, "cv scale invariance failed at sample " + std::to_string(i));
            return;
        }
        if (n >= 4 && !close(quartile_coefficient_of_dispersion(scaled),
                             quartile_coefficient_of_dispersion(xs))) {
            c.expect(false, "qcd scale invariance failed at sample " + std::to_string(i));
            return;
        }
    }
    c.note("7 fixed oracles + 1000 equivariance samples");
}

// Random synthetic project; the target line is always covered.
SyntheticProject random_project(std::uint64_t seed, double noise_rel) {
    SyntheticProject p;
    p.seed = seed;
    p.noise_rel = noise_rel;
    std::uint64_t s = seed * 6364136223846793005ULL + 1;
    const int lines = 3 + static_cast<int>(mix64(s += 1) % 6);
    const int tests = 2 + static_cast<int>(mix64(s += 1) % 5);
    for (int l = 1; l <= lines; ++l)
        p.lines.push_back({{"src/gen.c", l}, 20.0 + to_unit_interval(mix64(s += 1)) * 200.0});
    for (int t = 0; t < tests; ++t) {
        SyntheticProject::Test test;
        test.id = "t" + std::to_string(t);
        for (int l = 1; l <= lines; ++l)
            if (l % tests == t % lines % tests || mix64(s += 1) % 3 == 0)
                test.covers[FileLine{"src/gen.c", l}] = 1 + static_cast<int>(mix64(s += 1) % 3);
        p.tests.push_back(std::move(test));
    }
    // the first test always covers line 1 (the mutation target)
    p.tests[0].covers[FileLine{"src/gen.c", 1}] = 1;
    return p;
}

double max_test_energy(const SyntheticProject& p) {
    double max_energy = 0.0;
    for (const auto& t : p.tests) {
        double energy = 0.0;
        for (const auto& [fl, count] : t.covers)
            for (const auto& line : p.lines)
                if (line.at == fl)
                    energy += count * line.cost_uj;
        max_energy = std::max(max_energy, energy);
    }
    return max_energy;
}

// ---------------------------------------------------------------------------
// Criterion 3: on 100 seeded scenarios with payload >= 10x the noise
// amplitude every mutation is tagged breaking, and 100 zero-noise no-op
// scenarios give delta_omega == 0 exactly.
// ---------------------------------------------------------------------------
void criterion_detection_sanity(Checker& c) {
    int breaking = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const double noise = 0.005 + to_unit_interval(mix64(seed)) * 0.045;
        const SyntheticProject p = random_project(seed, noise);
        const double payload = 10.0 * noise * max_test_energy(p);
        const ExperimentOutcome outcome =
            run_detection_experiment(p, payload, {"src/gen.c", 1}, 10);
        if (outcome.detected_breaking)
            ++breaking;
    }
    c.expect(breaking == 100,
             "mutated scenarios breaking in " + std::to_string(breaking) + "/100");

    int exact_zero = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const SyntheticProject p = random_project(seed, 0.0);
        const ExperimentOutcome outcome = run_detection_experiment(p, 0.0, {"src/gen.c", 1}, 10);
        if (outcome.delta_omega == 0.0 && !outcome.detected_breaking)
            ++exact_zero;
    }
    c.expect(exact_zero == 100,
             "zero-noise no-ops exactly zero in " + std::to_string(exact_zero) + "/100");
    c.note("100/100 mutated breaking, 100/100 no-op exact zeros");
}

// ---------------------------------------------------------------------------
// Criterion 4: localization. 1 payload line + 4 benign decoys with
// disjoint coverage: rank 1 in >= 95% of 50 noisy scenarios, 100% with zero
// noise.
// ---------------------------------------------------------------------------
SyntheticProject disjoint_project(std::uint64_t seed, double noise_rel) {
    SyntheticProject p;
    p.seed = seed;
    p.noise_rel = noise_rel;
    std::uint64_t s = seed ^ 0x9e3779b97f4a7c15ULL;
    for (int l = 1; l <= 5; ++l) {
        p.lines.push_back({{"src/d.c", l}, 50.0 + to_unit_interval(mix64(s += 1)) * 150.0});
        SyntheticProject::Test test;
        test.id = "t" + std::to_string(l);
        test.covers[FileLine{"src/d.c", l}] = 1;
        p.tests.push_back(std::move(test));
    }
    return p;
}

void criterion_localization_rank(Checker& c) {
    const std::set<FileLine> decoys = {
        {"src/d.c", 2}, {"src/d.c", 3}, {"src/d.c", 4}, {"src/d.c", 5}};

    int rank_one_noisy = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const double noise = 0.01;
        const SyntheticProject p = disjoint_project(seed, noise);
        // The payload must both exceed 10x the noise amplitude and outweigh
        // the 4 x 5 uJ the decoys save, or the commit is not breaking and
        // nothing gets ranked.
        const double payload = 40.0 + 10.0 * noise * max_test_energy(p);
        const ExperimentOutcome outcome =
            run_localization_experiment(p, decoys, -5.0, {"src/d.c", 1}, payload, 10);
        if (outcome.detected_breaking && outcome.rank_of_truth && *outcome.rank_of_truth == 1)
            ++rank_one_noisy;
    }
    c.expect(rank_one_noisy >= 48,
             "noisy rank-1 rate " + std::to_string(rank_one_noisy) + "/50 < 95%");

    int rank_one_clean = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const SyntheticProject p = disjoint_project(seed, 0.0);
        const ExperimentOutcome outcome =
            run_localization_experiment(p, decoys, -5.0, {"src/d.c", 1}, 100.0, 10);
        if (outcome.detected_breaking && outcome.rank_of_truth && *outcome.rank_of_truth == 1)
            ++rank_one_clean;
    }
    c.expect(rank_one_clean == 50,
             "zero-noise rank-1 rate " + std::to_string(rank_one_clean) + "/50 < 100%");
    c.note(std::to_string(rank_one_noisy) + "/50 noisy rank-1, " +
           std::to_string(rank_one_clean) + "/50 zero-noise rank-1");
}

// ---------------------------------------------------------------------------
// Criterion 5: delta_omega equals an independent naive evaluation of
// theta -> Theta -> phi -> omega -> Omega -> delta_omega on 1000 random
// instances, max abs diff < 1e-9.
// ---------------------------------------------------------------------------
void criterion_brute_force(Checker& c) {
    std::uint64_t s = 31337;
    double max_diff = 0.0;
    int instances = 0;
    while (instances < 1000) {
        const int lines = 1 + static_cast<int>(mix64(s += 1) % 5);
        const int tests = 1 + static_cast<int>(mix64(s += 1) % 8);
        std::vector<std::vector<int>> exec(static_cast<std::size_t>(lines),
                                           std::vector<int>(static_cast<std::size_t>(tests)));
        bool any = false;
        for (auto& row : exec)
            for (int& e : row) {
                e = static_cast<int>(mix64(s += 1) % 5);
                any = any || e > 0;
            }
        if (!any)
            continue;
        ++instances;
        std::vector<double> deltas(static_cast<std::size_t>(tests));
        for (double& d : deltas)
            d = (to_unit_interval(mix64(s += 1)) - 0.5) * 100.0;

        // Naive route straight from the definitions.
        double theta_total = 0.0;
        std::vector<double> theta(static_cast<std::size_t>(lines), 0.0);
        for (int l = 0; l < lines; ++l) {
            for (int t = 0; t < tests; ++t)
                theta[l] += exec[l][t];
            theta_total += theta[l];
        }
        double naive = 0.0;
        for (int t = 0; t < tests; ++t) {
            double omega = 0.0;
            for (int l = 0; l < lines; ++l)
                omega += theta[l] / theta_total * exec[l][t];
            naive += deltas[t] * omega;
        }

        // Engine route.
        ChangeSet change;
        TestSelection sel;
        CoverageMap cov_v1, cov_v2;
        cov_v1.version = Version::V1;
        cov_v2.version = Version::V2;
        std::map<TestId, double> delta_map;
        for (int l = 0; l < lines; ++l)
            change.additions.insert({"gen.c", l + 1, Version::V2});
        for (int t = 0; t < tests; ++t) {
            const TestId id = "t" + std::to_string(t);
            sel.selected.insert(id);
            delta_map[id] = deltas[t];
            cov_v2.tests[id];
            for (int l = 0; l < lines; ++l)
                if (exec[l][t] > 0)
                    cov_v2.tests[id][FileLine{"gen.c", l + 1}] = exec[l][t];
        }
        const double engine =
            weighted_delta(delta_map, line_weights(change, sel, cov_v1, cov_v2), cov_v1, cov_v2,
                           MetricKind::EnergyPkg)
                .delta_omega;
        max_diff = std::max(max_diff, std::abs(engine - naive));
    }
    c.expect(max_diff < 1e-9, "max abs diff " + std::to_string(max_diff));
    std::ostringstream note;
    note << "1000 instances, max |engine - naive| = " << max_diff;
    c.note(note.str());
}

// ---------------------------------------------------------------------------
// Criterion 6: Algorithm 1 contract through the CLI. 10 uJ/read quantum,
// payload 35 -> consumed 40 in 4 iterations, identical across 10 runs.
// ---------------------------------------------------------------------------
void criterion_burn_cli(Checker& c) {
    const std::string cli = cli_path();
    if (cli.empty()) {
        c.expect(false, "EDELTA_CLI is not set");
        return;
    }
    const fs::path dir = scratch_dir("burn");
    const fs::path spec = dir / "sim.json";
    write_text_file(spec, R"({"seed": 0, "read_quantum_uj": 10.0, "noise_rel": 0.0})");

    std::string first;
    for (int i = 0; i < 10; ++i) {
        const CmdResult r = run_command(cli + " burn --payload-uj 35 --seed 7 --simulated " +
                                        spec.string());
        if (r.exit_code != 0) {
            c.expect(false, "burn exited with " + std::to_string(r.exit_code));
            return;
        }
        if (i == 0) {
            first = r.out;
            const json parsed = json::parse(r.out);
            c.expect(parsed.at("consumed_uj").get<long long>() == 40, "consumed_uj != 40");
            c.expect(parsed.at("iterations").get<long long>() == 4, "iterations != 4");
        } else {
            c.expect(r.out == first, "run " + std::to_string(i) + " differs");
        }
    }
    c.note("consumed=40 iterations=4, 10/10 byte-identical");
}

// ---------------------------------------------------------------------------
// Criterion 7: powercap wraparound. Counter at 999_990 of max 1_000_000
// wraps to 10 inside the bracket -> exactly 20 uJ.
// ---------------------------------------------------------------------------
void criterion_powercap_wrap(Checker& c) {
    const fs::path root = scratch_dir("powercap");
    const fs::path domain = root / "intel-rapl:0";
    fs::create_directories(domain);
    write_text_file(domain / "name", "package-0\n");
    write_text_file(domain / "energy_uj", "999990\n");
    write_text_file(domain / "max_energy_range_uj", "1000000\n");

    ProbeConfig config;
    config.enabled_metrics = {MetricKind::EnergyPkg};
    config.powercap_root = root;

    ProbeSession session = start_probe(config);
    write_text_file(domain / "energy_uj", "10\n");
    const double delta = session.stop().at(MetricKind::EnergyPkg);
    c.expect(delta == 20.0, "wrap-corrected delta is " + std::to_string(delta));
    c.note("999990 -> 10 (max 1000000) read as 20 uJ");
}

// ---------------------------------------------------------------------------
// Criterion 8: pipeline determinism and the exit-code contract through the
// CLI on simulated fixtures.
// ---------------------------------------------------------------------------
fs::path write_pipeline_fixture(const std::string& tag, double t1_v2_energy, double noise_rel) {
    const fs::path dir = scratch_dir("pipeline-" + tag);
    fs::create_directories(dir / "ws1");
    fs::create_directories(dir / "ws2");
    write_text_file(dir / "diff.patch",
                    "--- a/src/lib.c\n+++ b/src/lib.c\n@@ -1,1 +1,1 @@\n-old\n+new\n");
    const std::string cov = R"("tests": {"t1": {"src/lib.c": {"1": 1}}})";
    write_text_file(dir / "cov_v1.json", std::string(R"({"version": "v1", )") + cov + "}");
    write_text_file(dir / "cov_v2.json", std::string(R"({"version": "v2", )") + cov + "}");

    SimulatedProbeSpec spec;
    spec.seed = 42;
    spec.noise_rel = noise_rel;
    spec.per_test_base["t1@v1"][MetricKind::EnergyPkg] = 100.0;
    spec.per_test_base["t1@v2"][MetricKind::EnergyPkg] = t1_v2_energy;
    write_text_file(dir / "spec.json", canonical_dump(spec.to_json()));

    json config{{"workspace_v1", (dir / "ws1").string()},
                {"workspace_v2", (dir / "ws2").string()},
                {"diff", (dir / "diff.patch").string()},
                {"coverage_v1", (dir / "cov_v1.json").string()},
                {"coverage_v2", (dir / "cov_v2.json").string()},
                {"test_command", "true # {test_id}"},
                {"repetitions", 5},
                {"warmup_runs", 0},
                {"settle_ms", 0},
                {"output", (dir / "report.json").string()},
                {"probe",
                 {{"metrics", {"energy_pkg_uj", "duration_s"}},
                  {"simulated", (dir / "spec.json").string()}}}};
    write_text_file(dir / "config.json", canonical_dump(config));
    return dir;
}

void criterion_pipeline_cli(Checker& c) {
    const std::string cli = cli_path();
    if (cli.empty()) {
        c.expect(false, "EDELTA_CLI is not set");
        return;
    }

    // determinism: 5 invocations, byte-identical reports
    const fs::path breaking_dir = write_pipeline_fixture("breaking", 140.0, 0.05);
    std::string first_report;
    for (int i = 0; i < 5; ++i) {
        const CmdResult r =
            run_command(cli + " run --config " + (breaking_dir / "config.json").string());
        if (r.exit_code != 1) {
            c.expect(false, "breaking fixture exit " + std::to_string(r.exit_code) + " != 1");
            return;
        }
        const std::string report = read_text_file(breaking_dir / "report.json");
        if (i == 0)
            first_report = report;
        else
            c.expect(report == first_report, "report bytes differ on run " + std::to_string(i));
    }

    const fs::path identity_dir = write_pipeline_fixture("identity", 100.0, 0.0);
    const CmdResult identity =
        run_command(cli + " run --config " + (identity_dir / "config.json").string());
    c.expect(identity.exit_code == 0,
             "identity fixture exit " + std::to_string(identity.exit_code) + " != 0");

    // positive delta whose v1/v2 ranges overlap under noise: inconclusive
    const fs::path overlap_dir = write_pipeline_fixture("overlap", 110.0, 0.25);
    const CmdResult overlap =
        run_command(cli + " run --config " + (overlap_dir / "config.json").string());
    c.expect(overlap.exit_code == 2,
             "inconclusive fixture exit " + std::to_string(overlap.exit_code) + " != 2");
    const json overlap_report = json::parse(read_text_file(overlap_dir / "report.json"));
    c.expect(overlap_report.at("verdict") == "inconclusive",
             "expected verdict inconclusive, got " +
                 overlap_report.at("verdict").get<std::string>());
    c.expect(overlap_report.at("metrics").at("energy_pkg_uj").at("delta_omega").get<double>() >
                 0.0,
             "overlap fixture delta_omega is not positive");

    c.note("5/5 byte-identical breaking reports; exits 1/0/2 on breaking/identity/overlap");
}

struct Criterion {
    int id;
    std::string name;
    double budget_seconds;
    std::function<void(Checker&)> run;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "worked-example-reproduction", 1.0, criterion_worked_example},
        {2, "statistics-oracles-and-equivariance", 0.0, criterion_statistics},
        {3, "detection-desk-scale-sanity", 30.0, criterion_detection_sanity},
        {4, "localization-ground-truth-rank1", 30.0, criterion_localization_rank},
        {5, "delta-omega-brute-force-equivalence", 0.0, criterion_brute_force},
        {6, "burn-cli-algorithm-contract", 0.0, criterion_burn_cli},
        {7, "powercap-wraparound", 0.0, criterion_powercap_wrap},
        {8, "pipeline-determinism-and-exit-codes", 0.0, criterion_pipeline_cli},
    };

    bool all_ok = true;
    for (const Criterion& criterion : criteria) {
        Checker checker;
        const auto start = std::chrono::steady_clock::now();
        try {
            criterion.run(checker);
        } catch (const std::exception& e) {
            checker.expect(false, std::string("exception: ") + e.what());
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (criterion.budget_seconds > 0.0 && elapsed > criterion.budget_seconds)
            checker.expect(false, "runtime " + std::to_string(elapsed) + "s over budget " +
                                      std::to_string(criterion.budget_seconds) + "s");

        std::printf("%s  criterion %d %s (%.2fs)%s%s\n", checker.ok ? "PASS" : "FAIL",
                    criterion.id, criterion.name.c_str(), elapsed,
                    checker.detail.empty() ? "" : ": ", checker.detail.c_str());
        all_ok = all_ok && checker.ok;
    }
    return all_ok ? 0 : 1;
}
