#include <doctest.h>

#include "edelta/simlab.hpp"

using namespace edelta;

namespace {

// Two files, four lines, four tests with disjoint coverage plus one shared
// line.
SyntheticProject demo_project(double noise_rel = 0.0, std::uint64_t seed = 1) {
    SyntheticProject p;
    p.noise_rel = noise_rel;
    p.seed = seed;
    p.lines = {
        {{"src/a.c", 1}, 100.0},
        {{"src/a.c", 2}, 50.0},
        {{"src/b.c", 1}, 80.0},
        {{"src/b.c", 2}, 40.0},
    };
    p.tests = {
        {"t_a1", {{{"src/a.c", 1}, 1}}},
        {"t_a2", {{{"src/a.c", 2}, 2}}},
        {"t_b1", {{{"src/b.c", 1}, 1}}},
        {"t_b2", {{{"src/b.c", 2}, 3}}},
    };
    return p;
}

} // namespace

TEST_SUITE("simlab") {

TEST_CASE("zero-noise measurement equals the linear cost model") {
    const SyntheticProject p = demo_project();
    const MeasurementLog log = synthesize_log(p, {}, 3, {"t_a1", "t_a2"});
    CHECK(log.values("t_a1", Version::V1, MetricKind::EnergyPkg) ==
          std::vector<double>{100, 100, 100});
    // t_a2 executes line 2 twice at 50 uJ
    CHECK(log.values("t_a2", Version::V2, MetricKind::EnergyPkg) ==
          std::vector<double>{100, 100, 100});
}

TEST_CASE("detection: payload on a covered line is detected as breaking") {
    const ExperimentOutcome outcome =
        run_detection_experiment(demo_project(), 100.0, {"src/a.c", 1}, 5);
    CHECK(outcome.detected_breaking);
    CHECK(outcome.verdict == kVerdictBreaking);
    CHECK(outcome.per_test_deltas.at("t_a1") == 100.0);
    CHECK(outcome.delta_omega == 100.0); // single covered changed line, phi = omega = 1
    REQUIRE(outcome.rank_of_truth.has_value());
    CHECK(*outcome.rank_of_truth == 1);
}

TEST_CASE("detection: identity mutation yields exactly zero") {
    const ExperimentOutcome outcome =
        run_detection_experiment(demo_project(), 0.0, {"src/a.c", 1}, 5);
    CHECK(outcome.delta_omega == 0.0);
    CHECK_FALSE(outcome.detected_breaking);
    CHECK_FALSE(outcome.rank_of_truth.has_value());
}

TEST_CASE("detection: payload much larger than noise is still detected") {
    // noise 1%, payload 10x the absolute noise amplitude of the hottest test
    const SyntheticProject p = demo_project(0.01, 77);
    const double amplitude = 0.01 * 120.0; // t_b2 base is the largest at 120
    const ExperimentOutcome outcome =
        run_detection_experiment(p, 10.0 * amplitude, {"src/a.c", 1}, 10);
    CHECK(outcome.detected_breaking);
}

TEST_CASE("detection: per-test delta equals the payload with zero noise") {
    // payload 100 uJ on a line executed once by exactly one test
    const ExperimentOutcome outcome =
        run_detection_experiment(demo_project(), 100.0, {"src/b.c", 1}, 4);
    CHECK(outcome.per_test_deltas.at("t_b1") == 100.0);
}

TEST_CASE("localization: ground-truth payload line ranks first among benign decoys") {
    // decoys reduce cost; hand evaluation of the induced spectrum puts the
    // payload line at score 1 and the decoys at 0.
    const std::set<FileLine> decoys = {{"src/a.c", 2}, {"src/b.c", 1}, {"src/b.c", 2}};
    const ExperimentOutcome outcome =
        run_localization_experiment(demo_project(), decoys, -10.0, {"src/a.c", 1}, 500.0, 5);
    CHECK(outcome.detected_breaking);
    REQUIRE(outcome.rank_of_truth.has_value());
    CHECK(*outcome.rank_of_truth == 1);
    REQUIRE_FALSE(outcome.ranking.entries.empty());
    CHECK(outcome.ranking.entries[0].line == LineRef{"src/a.c", 1, Version::V2});
    CHECK(outcome.ranking.entries[0].score == 1.0);
    CHECK(outcome.ranking.entries[1].score == 0.0);
}

TEST_CASE("localization: all-benign change is not breaking and not ranked") {
    const std::set<FileLine> decoys = {{"src/a.c", 2}, {"src/b.c", 1}};
    const ExperimentOutcome outcome =
        run_localization_experiment(demo_project(), decoys, -5.0, {"src/a.c", 1}, 0.0, 5);
    CHECK_FALSE(outcome.detected_breaking);
    CHECK(outcome.ranking.entries.empty());
    CHECK_FALSE(outcome.rank_of_truth.has_value());
}

TEST_CASE("localization: payload on an uncovered line flags undetectable") {
    SyntheticProject p = demo_project();
    p.lines.push_back({{"src/a.c", 9}, 10.0}); // no test covers this line
    const ExperimentOutcome outcome =
        run_localization_experiment(p, {{"src/a.c", 2}}, -1.0, {"src/a.c", 9}, 100.0, 5);
    CHECK(outcome.undetectable);
}

TEST_CASE("detection: uncovered target means no covering tests") {
    SyntheticProject p = demo_project();
    p.lines.push_back({{"src/a.c", 9}, 10.0});
    const ExperimentOutcome outcome = run_detection_experiment(p, 100.0, {"src/a.c", 9}, 5);
    CHECK(outcome.undetectable);
    CHECK(outcome.verdict == kVerdictNoCoveringTests);
    CHECK_FALSE(outcome.detected_breaking);
}

TEST_CASE("stability: zero noise means zero dispersion") {
    const auto summaries = run_stability_experiment(demo_project(), 5);
    for (const auto& [test, metrics] : summaries) {
        (void)test;
        for (const auto& [metric, s] : metrics) {
            (void)metric;
            CHECK(s.stddev == 0.0);
            if (s.cv)
                CHECK(*s.cv == 0.0);
        }
    }
}

TEST_CASE("stability: uniform multiplicative noise lands near the analytic CV") {
    // CV of value*(1+U(-a,a)) is a/sqrt(3) up to sampling error.
    SyntheticProject p = demo_project(0.05, 1234);
    const auto summaries = run_stability_experiment(p, 400);
    const StabilitySummary& s = summaries.at("t_a1").at(MetricKind::EnergyPkg);
    REQUIRE(s.cv.has_value());
    const double analytic = 0.05 / std::sqrt(3.0);
    CHECK(*s.cv == doctest::Approx(analytic).epsilon(0.15));
}

TEST_CASE("stability: fewer than four repetitions is a precondition error") {
    CHECK_THROWS_AS(run_stability_experiment(demo_project(), 3), SampleTooSmall);
}

TEST_CASE("experiments are deterministic under a fixed seed") {
    const SyntheticProject p = demo_project(0.03, 99);
    const json a = run_detection_experiment(p, 200.0, {"src/a.c", 1}, 8).to_json();
    const json b = run_detection_experiment(p, 200.0, {"src/a.c", 1}, 8).to_json();
    CHECK(a == b);
}

TEST_CASE("zero-noise soundness over seeds") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        SyntheticProject p = demo_project(0.0, seed);
        const ExperimentOutcome mutated = run_detection_experiment(p, 50.0, {"src/a.c", 1}, 5);
        CHECK(mutated.detected_breaking);
        const ExperimentOutcome noop = run_detection_experiment(p, 0.0, {"src/a.c", 1}, 5);
        CHECK(noop.delta_omega == 0.0);
    }
}

TEST_CASE("detection power is monotone in payload size") {
    // breaking rate over seeds must not decrease as the payload grows
    const std::vector<double> payloads = {0.0, 1.0, 5.0, 50.0, 500.0};
    std::vector<int> breaking_counts;
    for (double payload : payloads) {
        int breaking = 0;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            SyntheticProject p = demo_project(0.02, seed);
            if (run_detection_experiment(p, payload, {"src/a.c", 1}, 6).detected_breaking)
                ++breaking;
        }
        breaking_counts.push_back(breaking);
    }
    for (std::size_t i = 1; i < breaking_counts.size(); ++i)
        CHECK(breaking_counts[i] >= breaking_counts[i - 1]);
}

TEST_CASE("scenario json driver") {
    json scenario;
    scenario["project"] = demo_project().to_json();
    scenario["experiment"] = {
        {"kind", "detection"}, {"reps", 5}, {"payload_uj", 100.0},
        {"target", {{"file", "src/a.c"}, {"line", 1}}}};
    const json outcome = run_scenario(scenario);
    CHECK(outcome.at("kind") == "detection");
    CHECK(outcome.at("detected_breaking").get<bool>());
    CHECK(outcome.at("rank_of_truth").get<int>() == 1);

    scenario["experiment"] = {{"kind", "stability"}, {"reps", 6}};
    const json stability = run_scenario(scenario);
    CHECK(stability.at("summaries").contains("t_a1"));

    scenario["experiment"] = {{"kind", "bogus"}};
    CHECK_THROWS_AS(run_scenario(scenario), ParseError);
}

TEST_CASE("sweep emits the pinned CSV columns") {
    json scenario;
    scenario["project"] = demo_project(0.01, 3).to_json();
    scenario["experiment"] = {
        {"kind", "detection"}, {"reps", 5}, {"target", {{"file", "src/a.c"}, {"line", 1}}}};
    const std::string csv = run_sweep(scenario, {0.0, 100.0}, 5);
    CHECK(csv.rfind("payload_uj,breaking_rate,mean_rank\n", 0) == 0);
    // payload 100 with 1% noise: every seeded run detects it
    CHECK(csv.find("100.000000,1.000000,1.000000") != std::string::npos);
}

TEST_CASE("project json round-trip") {
    const SyntheticProject p = demo_project(0.04, 11);
    const SyntheticProject back = SyntheticProject::from_json(p.to_json());
    CHECK(back.seed == p.seed);
    CHECK(back.noise_rel == p.noise_rel);
    CHECK(back.lines.size() == p.lines.size());
    CHECK(back.tests.size() == p.tests.size());
    CHECK(back.to_json() == p.to_json());

    json bad = p.to_json();
    bad["tests"][0]["covers"]["src/zzz.c"]["1"] = 1; // unknown line
    CHECK_THROWS_AS(SyntheticProject::from_json(bad), ParseError);
}

} // TEST_SUITE
