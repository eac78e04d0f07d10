#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "edelta/delta.hpp"
#include "edelta/faultloc.hpp"
#include "edelta/mutator.hpp"
#include "edelta/pipeline.hpp"

namespace py = pybind11;
using namespace edelta;

namespace {

// The bindings trade in JSON strings; the python package turns them into
// dicts. Keeps the surface small and the schemas identical to the CLI's.

std::string parse_diff_json(const std::string& diff_text) {
    const ChangeSet change = parse_unified_diff(diff_text);
    json deletions = json::array();
    for (const LineRef& l : change.deletions)
        deletions.push_back(json{{"file", l.file}, {"line", l.line}});
    json additions = json::array();
    for (const LineRef& l : change.additions)
        additions.push_back(json{{"file", l.file}, {"line", l.line}});
    return json{{"deletions", std::move(deletions)},
                {"additions", std::move(additions)},
                {"touched_files", change.touched_files},
                {"warnings", change.warnings}}
        .dump();
}

std::string select_tests_json(const std::string& diff_text, const std::string& cov_v1_json,
                              const std::string& cov_v2_json,
                              const std::vector<std::string>& tests_glob) {
    const ChangeSet change = parse_unified_diff(diff_text);
    const CoverageMap cov_v1 = coverage_from_json(json::parse(cov_v1_json));
    const CoverageMap cov_v2 = coverage_from_json(json::parse(cov_v2_json));
    const TestSelection selection =
        select_tests(change, cov_v1, cov_v2, match_test_files(change.touched_files, tests_glob));
    return selection_to_json(selection).dump();
}

std::string weighted_verdict_json(const std::string& diff_text, const std::string& cov_v1_json,
                                  const std::string& cov_v2_json,
                                  const std::map<std::string, double>& per_test_deltas,
                                  double threshold) {
    const ChangeSet change = parse_unified_diff(diff_text);
    const CoverageMap cov_v1 = coverage_from_json(json::parse(cov_v1_json));
    const CoverageMap cov_v2 = coverage_from_json(json::parse(cov_v2_json));
    TestSelection selection;
    for (const auto& [test, delta] : per_test_deltas) {
        (void)delta;
        selection.selected.insert(test);
    }
    const std::vector<LineWeight> weights = line_weights(change, selection, cov_v1, cov_v2);
    WeightedVerdict verdict =
        weighted_delta(per_test_deltas, weights, cov_v1, cov_v2, MetricKind::EnergyPkg);
    verdict = classify(std::move(verdict), Conclusiveness::ConclusiveIncrease, threshold, false);

    json weights_j = json::array();
    for (const LineWeight& w : weights)
        weights_j.push_back(json{{"file", w.line.file},
                                 {"line", w.line.line},
                                 {"version", to_string(w.line.version)},
                                 {"theta", w.theta},
                                 {"phi", w.phi}});
    return json{{"delta_omega", verdict.delta_omega},
                {"breaking", verdict.breaking},
                {"omega", verdict.omega_per_test},
                {"capital_omega", verdict.capital_omega_per_test},
                {"line_weights", std::move(weights_j)}}
        .dump();
}

std::string localize_json(const std::string& diff_text, const std::string& cov_v1_json,
                          const std::string& cov_v2_json,
                          const std::map<std::string, double>& per_test_deltas) {
    const ChangeSet change = parse_unified_diff(diff_text);
    const CoverageMap cov_v1 = coverage_from_json(json::parse(cov_v1_json));
    const CoverageMap cov_v2 = coverage_from_json(json::parse(cov_v2_json));
    const auto [failing, passing] = partition_tests(per_test_deltas);
    const SuspiciousnessRanking ranking =
        tarantula_scores(build_spectrum(change, failing, passing, cov_v1, cov_v2));
    return ranking_to_json(ranking).dump();
}

std::string run_scenario_json(const std::string& scenario_json) {
    return run_scenario(json::parse(scenario_json)).dump();
}

std::string burn_simulated_json(std::int64_t payload_uj, std::uint64_t seed,
                                const std::string& spec_json) {
    ProbeConfig config;
    config.simulated = SimulatedProbeSpec::from_json(json::parse(spec_json));
    ProbeSession session = start_probe(config, MeasureContext{"burn", Version::V1, 0});
    const BurnResult result = consume_energy(session, payload_uj, seed);
    session.stop();
    return result.to_json().dump();
}

py::dict summary_dict(const StabilitySummary& s) {
    py::dict d;
    d["mean"] = s.mean;
    d["stddev"] = s.stddev;
    d["cv"] = s.cv ? py::object(py::float_(*s.cv)) : py::object(py::none());
    d["qcd"] = s.qcd ? py::object(py::float_(*s.qcd)) : py::object(py::none());
    d["q1"] = s.q1;
    d["q3"] = s.q3;
    d["min"] = s.min;
    d["max"] = s.max;
    d["n"] = s.n;
    return d;
}

} // namespace

PYBIND11_MODULE(_edelta, m) {
    m.doc() = "Energy regression testing core";

    py::register_exception<Error>(m, "EdeltaError");

    m.def("population_stddev",
          [](const std::vector<double>& xs) { return population_stddev(xs); });
    m.def("coefficient_of_variation",
          [](const std::vector<double>& xs) { return coefficient_of_variation(xs); });
    m.def("quartile_coefficient_of_dispersion",
          [](const std::vector<double>& xs) { return quartile_coefficient_of_dispersion(xs); });
    m.def("median", [](const std::vector<double>& xs) { return median(xs); });
    m.def("summarize", [](const std::vector<double>& xs) { return summary_dict(summarize(xs)); });
    m.def("ranges_disjoint", [](const std::vector<double>& a, const std::vector<double>& b) {
        return std::string(to_string(ranges_disjoint(a, b)));
    });
    m.def("mix64", &mix64);

    m.def("parse_diff_json", &parse_diff_json, py::arg("diff_text"));
    m.def("select_tests_json", &select_tests_json, py::arg("diff_text"), py::arg("coverage_v1"),
          py::arg("coverage_v2"), py::arg("tests_glob") = std::vector<std::string>{});
    m.def("weighted_verdict_json", &weighted_verdict_json, py::arg("diff_text"),
          py::arg("coverage_v1"), py::arg("coverage_v2"), py::arg("per_test_deltas"),
          py::arg("threshold") = 0.0);
    m.def("localize_json", &localize_json, py::arg("diff_text"), py::arg("coverage_v1"),
          py::arg("coverage_v2"), py::arg("per_test_deltas"));
    m.def("run_scenario_json", &run_scenario_json, py::arg("scenario"));
    m.def("burn_simulated_json", &burn_simulated_json, py::arg("payload_uj"), py::arg("seed"),
          py::arg("spec"));
}
