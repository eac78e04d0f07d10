#pragma once

#include <cstdint>
#include <set>

#include "edelta/core.hpp"
#include "edelta/diff.hpp"
#include "edelta/probes.hpp"

namespace edelta {

struct TargetUnresolvable : Error {
    using Error::Error;
};

enum class SeedSource { WallClock, FixedSeed };

// A planned energy-consumption mutation: burn `payload_uj` inside each
// targeted test's measured bracket, without altering functional behavior.
struct MutationSpec {
    std::uint64_t payload_uj = 0;
    std::set<LineRef> target_lines;
    std::set<TestId> target_tests;
    SeedSource seed_source = SeedSource::FixedSeed;
    std::uint64_t seed = 42;
};

struct BurnResult {
    std::int64_t consumed_uj = 0;
    std::uint64_t iterations = 0;
    std::uint64_t final_random = 0;

    json to_json() const;
    static BurnResult from_json(const json& j);
};

// Busy-loop until the session's cumulative energy passes start + payload.
// The random value chains through every iteration (mix64), defeating loop
// elision; iterations counts energy reads, so consumed_uj >= payload_uj
// always (never stops early).
BurnResult consume_energy(ProbeSession& probe, std::int64_t payload_uj, std::uint64_t rng_seed);

// The portable equivalent of injecting consumeEnergy into targeted methods:
// each affected test command gets a burn step prepended inside the measured
// bracket. Ground-truth mutated lines ride along for localization scoring.
struct MutationPlan {
    std::uint64_t payload_uj = 0;
    std::uint64_t seed = 0;
    SeedSource seed_source = SeedSource::FixedSeed;
    std::set<TestId> burn_tests;
    std::set<LineRef> ground_truth;
    // Prefix template; {payload_uj} and {seed} are substituted.
    std::string burn_command = "edelta burn --payload-uj {payload_uj} --seed {seed}";

    std::string wrap_command(const TestId& test, const std::string& cmd) const;

    json to_json() const;
    static MutationPlan from_json(const json& j);
};

// Line targets resolve to the selected tests covering them in `cov`;
// test targets must be selected. Unresolvable targets are reported together.
MutationPlan plan_mutation(const MutationSpec& spec, const TestSelection& selection,
                           const CoverageMap& cov);

} // namespace edelta
