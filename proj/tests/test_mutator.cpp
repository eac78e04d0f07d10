#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>

#include "edelta/mutator.hpp"

using namespace edelta;

namespace {

ProbeSession simulated_session(double quantum = 10.0, std::uint64_t seed = 1) {
    ProbeConfig config;
    config.enabled_metrics = {MetricKind::EnergyPkg};
    SimulatedProbeSpec spec;
    spec.seed = seed;
    spec.read_quantum_uj = quantum;
    config.simulated = spec;
    return start_probe(config, MeasureContext{"burn", Version::V1, 0});
}

} // namespace

TEST_SUITE("mutator") {

TEST_CASE("burn of 35 uJ against the 10 uJ quantum") {
    // Counter steps: start reads 10, loop reads 20, 30, 40, 50 >= 45.
    ProbeSession session = simulated_session(10.0);
    const BurnResult result = consume_energy(session, 35, 99);
    CHECK(result.consumed_uj == 40);
    CHECK(result.iterations == 4);
}

TEST_CASE("zero or negative payloads are rejected") {
    ProbeSession session = simulated_session();
    CHECK_THROWS_AS(consume_energy(session, 0, 1), Error);
    CHECK_THROWS_AS(consume_energy(session, -5, 1), Error);
}

TEST_CASE("fixed seed reproduces the burn exactly") {
    auto run = [] {
        ProbeSession session = simulated_session(10.0, 3);
        return consume_energy(session, 35, 1234);
    };
    const BurnResult first = run();
    for (int i = 0; i < 9; ++i) {
        const BurnResult again = run();
        CHECK(again.consumed_uj == first.consumed_uj);
        CHECK(again.iterations == first.iterations);
        CHECK(again.final_random == first.final_random);
    }
}

TEST_CASE("never under-burns") {
    for (std::int64_t payload : {1, 5, 10, 11, 35, 99, 100, 1000}) {
        ProbeSession session = simulated_session(10.0);
        const BurnResult result = consume_energy(session, payload, 7);
        CHECK(result.consumed_uj >= payload);
        CHECK(result.iterations >= 1);
        // exact within one counter quantum
        CHECK(result.consumed_uj < payload + 10);
    }
}

TEST_CASE("the random value chains through every body iteration") {
    ProbeSession session = simulated_session(10.0);
    const std::uint64_t seed = 42;
    const BurnResult result = consume_energy(session, 35, seed);

    // Replay R from the seed: one seeding application plus one per body
    // iteration (the final read exits before reassigning).
    std::uint64_t expected = mix64(seed);
    for (std::uint64_t i = 1; i < result.iterations; ++i)
        expected = mix64(expected);
    CHECK(result.final_random == expected);
}

TEST_CASE("plan from a line target burns in every covering selected test") {
    TestSelection selection;
    selection.selected = {"A", "B", "C"};
    CoverageMap cov;
    cov.version = Version::V2;
    cov.tests["A"][FileLine{"src/f.c", 3}] = 1;
    cov.tests["B"][FileLine{"src/f.c", 3}] = 2;
    cov.tests["C"][FileLine{"src/other.c", 1}] = 1;

    MutationSpec spec;
    spec.payload_uj = 500;
    spec.target_lines = {LineRef{"src/f.c", 3, Version::V2}};

    const MutationPlan plan = plan_mutation(spec, selection, cov);
    CHECK(plan.burn_tests == std::set<TestId>{"A", "B"});
    CHECK(plan.ground_truth == spec.target_lines);
    CHECK(plan.payload_uj == 500);
}

TEST_CASE("plan from a direct test target") {
    TestSelection selection;
    selection.selected = {"A", "C"};
    CoverageMap cov;
    cov.version = Version::V2;

    MutationSpec spec;
    spec.payload_uj = 100;
    spec.target_tests = {"C"};
    const MutationPlan plan = plan_mutation(spec, selection, cov);
    CHECK(plan.burn_tests == std::set<TestId>{"C"});
    CHECK(plan.ground_truth.empty());
}

TEST_CASE("uncovered targets are unresolvable") {
    TestSelection selection;
    selection.selected = {"A"};
    CoverageMap cov;
    cov.version = Version::V2;
    cov.tests["A"][FileLine{"src/f.c", 1}] = 1;

    MutationSpec spec;
    spec.payload_uj = 100;
    spec.target_lines = {LineRef{"src/f.c", 99, Version::V2}};
    CHECK_THROWS_AS(plan_mutation(spec, selection, cov), TargetUnresolvable);

    MutationSpec missing_test;
    missing_test.payload_uj = 100;
    missing_test.target_tests = {"ghost"};
    CHECK_THROWS_AS(plan_mutation(missing_test, selection, cov), TargetUnresolvable);
}

TEST_CASE("wrapped commands preserve the test exit code") {
    MutationPlan plan;
    plan.payload_uj = 10;
    plan.seed = 1;
    plan.burn_tests = {"T"};
    plan.burn_command = "true"; // stand-in burn step

    // Functional transparency: the wrap changes energy, not outcomes.
    const std::string pass_cmd = plan.wrap_command("T", "true");
    const std::string fail_cmd = plan.wrap_command("T", "exit 7");
    CHECK(WEXITSTATUS(std::system(pass_cmd.c_str())) == 0);
    CHECK(WEXITSTATUS(std::system(fail_cmd.c_str())) == 7);

    // untargeted tests stay untouched
    CHECK(plan.wrap_command("other", "true") == "true");
}

TEST_CASE("plan substitutes payload and seed into the burn command") {
    MutationPlan plan;
    plan.payload_uj = 250;
    plan.seed = 9;
    plan.burn_tests = {"T"};
    plan.burn_command = "burner --payload-uj {payload_uj} --seed {seed}";
    const std::string wrapped = plan.wrap_command("T", "run-test");
    CHECK(wrapped.find("--payload-uj 250") != std::string::npos);
    CHECK(wrapped.find("--seed 9") != std::string::npos);
    CHECK(wrapped.find("run-test") != std::string::npos);
}

TEST_CASE("plan json round-trip") {
    MutationPlan plan;
    plan.payload_uj = 77;
    plan.seed = 5;
    plan.burn_tests = {"A", "B"};
    plan.ground_truth = {LineRef{"src/f.c", 3, Version::V2}};
    const MutationPlan back = MutationPlan::from_json(plan.to_json());
    CHECK(back.payload_uj == plan.payload_uj);
    CHECK(back.seed == plan.seed);
    CHECK(back.burn_tests == plan.burn_tests);
    CHECK(back.ground_truth == plan.ground_truth);
}

} // TEST_SUITE
