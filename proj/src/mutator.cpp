#include "edelta/mutator.hpp"

namespace edelta {

json BurnResult::to_json() const {
    return json{
        {"consumed_uj", consumed_uj}, {"iterations", iterations}, {"final_random", final_random}};
}

BurnResult BurnResult::from_json(const json& j) {
    BurnResult r;
    try {
        r.consumed_uj = j.at("consumed_uj").get<std::int64_t>();
        r.iterations = j.at("iterations").get<std::uint64_t>();
        r.final_random = j.at("final_random").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw ParseError(ParseError::Kind::Schema, std::string("bad burn result: ") + e.what());
    }
    return r;
}

BurnResult consume_energy(ProbeSession& probe, std::int64_t payload_uj, std::uint64_t rng_seed) {
    if (payload_uj <= 0)
        throw Error("energy payload must be > 0");

    const double start = probe.read_current_energy_uj();
    const double threshold = start + static_cast<double>(payload_uj);

    std::uint64_t random = mix64(rng_seed);
    std::uint64_t iterations = 0;
    double current = start;
    for (;;) {
        try {
            current = probe.read_current_energy_uj();
        } catch (const ProbeReadError& e) {
            throw ProbeReadError(std::string(e.what()) + " after burning " +
                                 std::to_string(static_cast<std::int64_t>(current - start)) +
                                 " uJ of " + std::to_string(payload_uj));
        }
        ++iterations;
        if (current >= threshold)
            break;
        random = mix64(random);
    }

    BurnResult result;
    result.consumed_uj = static_cast<std::int64_t>(current - start);
    result.iterations = iterations;
    result.final_random = random;
    return result;
}

std::string MutationPlan::wrap_command(const TestId& test, const std::string& cmd) const {
    if (!burn_tests.count(test))
        return cmd;
    std::string burn = burn_command;
    auto substitute = [&](std::string_view placeholder, const std::string& value) {
        std::size_t pos = 0;
        while ((pos = burn.find(placeholder, pos)) != std::string::npos) {
            burn.replace(pos, placeholder.size(), value);
            pos += value.size();
        }
    };
    substitute("{payload_uj}", std::to_string(payload_uj));
    substitute("{seed}", std::to_string(seed));
    return burn + " && { " + cmd + " ; }";
}

json MutationPlan::to_json() const {
    json truth = json::array();
    for (const LineRef& l : ground_truth)
        truth.push_back(json{
            {"file", l.file}, {"line", l.line}, {"version", to_string(l.version)}});
    return json{{"payload_uj", payload_uj},
                {"seed", seed},
                {"seed_source", seed_source == SeedSource::FixedSeed ? "fixed" : "wallclock"},
                {"tests", burn_tests},
                {"ground_truth", std::move(truth)},
                {"burn_command", burn_command}};
}

MutationPlan MutationPlan::from_json(const json& j) {
    MutationPlan plan;
    try {
        plan.payload_uj = j.at("payload_uj").get<std::uint64_t>();
        plan.seed = j.at("seed").get<std::uint64_t>();
        plan.seed_source = j.value("seed_source", std::string("fixed")) == "wallclock"
                               ? SeedSource::WallClock
                               : SeedSource::FixedSeed;
        plan.burn_tests = j.at("tests").get<std::set<TestId>>();
        for (const json& l : j.at("ground_truth"))
            plan.ground_truth.insert(LineRef{l.at("file").get<std::string>(),
                                             l.at("line").get<int>(),
                                             version_from_string(l.at("version").get<std::string>())});
        plan.burn_command = j.value("burn_command", plan.burn_command);
    } catch (const json::exception& e) {
        throw ParseError(ParseError::Kind::Schema, std::string("bad mutation plan: ") + e.what());
    }
    return plan;
}

MutationPlan plan_mutation(const MutationSpec& spec, const TestSelection& selection,
                           const CoverageMap& cov) {
    if (spec.payload_uj == 0)
        throw Error("mutation payload must be > 0");
    if (spec.target_lines.empty() && spec.target_tests.empty())
        throw Error("mutation spec has no targets");

    MutationPlan plan;
    plan.payload_uj = spec.payload_uj;
    plan.seed = spec.seed;
    plan.seed_source = spec.seed_source;

    std::vector<std::string> unresolved;
    for (const TestId& t : spec.target_tests) {
        if (selection.selected.count(t))
            plan.burn_tests.insert(t);
        else
            unresolved.push_back("test " + t);
    }
    for (const LineRef& l : spec.target_lines) {
        bool covered = false;
        for (const TestId& t : selection.selected) {
            if (cov.exec(l, t) > 0) {
                plan.burn_tests.insert(t);
                covered = true;
            }
        }
        if (covered)
            plan.ground_truth.insert(l);
        else
            unresolved.push_back("line " + to_string(l));
    }

    if (!unresolved.empty()) {
        std::string msg = "unresolvable mutation targets:";
        for (const std::string& u : unresolved)
            msg += " " + u;
        throw TargetUnresolvable(msg);
    }
    return plan;
}

} // namespace edelta
