#include "edelta/report.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace edelta {

namespace {

double checked(double x, const char* what) {
    if (!std::isfinite(x))
        throw SerializationError(std::string("non-finite value for ") + what);
    return x;
}

json summary_to_json(const StabilitySummary& s, double cv_threshold, double qcd_threshold) {
    json j{{"mean", checked(s.mean, "mean")},
           {"stddev", checked(s.stddev, "stddev")},
           {"q1", checked(s.q1, "q1")},
           {"q3", checked(s.q3, "q3")},
           {"min", checked(s.min, "min")},
           {"max", checked(s.max, "max")},
           {"n", s.n},
           {"stable", is_stable(s, cv_threshold, qcd_threshold)}};
    j["cv"] = s.cv ? json(checked(*s.cv, "cv")) : json(nullptr);
    j["qcd"] = s.qcd ? json(checked(*s.qcd, "qcd")) : json(nullptr);
    return j;
}

StabilitySummary summary_from_json(const json& j) {
    StabilitySummary s;
    s.mean = j.at("mean").get<double>();
    s.stddev = j.at("stddev").get<double>();
    s.q1 = j.at("q1").get<double>();
    s.q3 = j.at("q3").get<double>();
    s.min = j.at("min").get<double>();
    s.max = j.at("max").get<double>();
    s.n = j.at("n").get<std::size_t>();
    if (!j.at("cv").is_null())
        s.cv = j.at("cv").get<double>();
    if (!j.at("qcd").is_null())
        s.qcd = j.at("qcd").get<double>();
    return s;
}

Conclusiveness conclusiveness_from_string(std::string_view s) {
    if (s == "conclusive-increase")
        return Conclusiveness::ConclusiveIncrease;
    if (s == "conclusive-decrease")
        return Conclusiveness::ConclusiveDecrease;
    if (s == "inconclusive")
        return Conclusiveness::Inconclusive;
    throw ParseError(ParseError::Kind::Schema, "unknown conclusiveness: " + std::string(s));
}

} // namespace

int DeltaReport::exit_code() const {
    if (verdict == kVerdictBreaking)
        return 1;
    if (verdict == kVerdictInconclusive || verdict == kVerdictNoCoveringTests)
        return 2;
    return 0;
}

json report_to_json(const DeltaReport& report) {
    json weights = json::array();
    for (const LineWeight& w : report.weights)
        weights.push_back(json{{"file", w.line.file},
                               {"line", w.line.line},
                               {"version", to_string(w.line.version)},
                               {"theta", w.theta},
                               {"phi", checked(w.phi, "phi")}});

    json metrics = json::object();
    for (const auto& [metric, mr] : report.metrics) {
        json tests = json::object();
        for (const auto& [test, delta] : mr.tests) {
            json t{{"delta", checked(delta.delta, "delta")},
                   {"v1", summary_to_json(delta.v1_summary, report.cv_threshold,
                                          report.qcd_threshold)},
                   {"v2", summary_to_json(delta.v2_summary, report.cv_threshold,
                                          report.qcd_threshold)}};
            auto omega = mr.verdict.omega_per_test.find(test);
            if (omega != mr.verdict.omega_per_test.end())
                t["omega"] = checked(omega->second, "omega");
            auto capital = mr.verdict.capital_omega_per_test.find(test);
            if (capital != mr.verdict.capital_omega_per_test.end())
                t["capital_omega"] = checked(capital->second, "capital_omega");
            auto conclusive = mr.test_conclusive.find(test);
            if (conclusive != mr.test_conclusive.end())
                t["conclusive"] = to_string(conclusive->second);
            tests[test] = std::move(t);
        }
        json m{{"delta_omega", checked(mr.verdict.delta_omega, "delta_omega")},
               {"abs_omega_total", checked(mr.verdict.abs_omega_total, "abs_omega_total")},
               {"breaking", mr.verdict.breaking},
               {"conclusive", to_string(mr.verdict.conclusive)},
               {"conclusiveness_checked", mr.verdict.conclusiveness_checked},
               {"tests", std::move(tests)}};
        if (!mr.verdict.annotation.empty())
            m["annotation"] = mr.verdict.annotation;
        metrics[metric_name(metric)] = std::move(m);
    }

    return json{{"schema", "edelta-report-v1"},
                {"verdict", report.verdict},
                {"verdict_metric", metric_name(report.verdict_metric)},
                {"exit_code", report.exit_code()},
                {"threshold", checked(report.threshold, "threshold")},
                {"aggregator", std::string(to_string(report.aggregator))},
                {"stability",
                 json{{"cv_threshold", report.cv_threshold},
                      {"qcd_threshold", report.qcd_threshold}}},
                {"selection", selection_to_json(report.selection)},
                {"line_weights", std::move(weights)},
                {"metrics", std::move(metrics)},
                {"ranking", ranking_to_json(report.ranking)},
                {"plan_digest", report.plan_digest}};
}

DeltaReport report_from_json(const json& j) {
    DeltaReport report;
    try {
        report.verdict = j.at("verdict").get<std::string>();
        auto metric = metric_from_name(j.at("verdict_metric").get<std::string>());
        if (!metric)
            throw ParseError(ParseError::Kind::Schema, "unknown verdict metric");
        report.verdict_metric = *metric;
        report.threshold = j.at("threshold").get<double>();
        report.aggregator = aggregator_from_string(j.at("aggregator").get<std::string>());
        report.cv_threshold = j.at("stability").at("cv_threshold").get<double>();
        report.qcd_threshold = j.at("stability").at("qcd_threshold").get<double>();
        report.selection = selection_from_json(j.at("selection"));
        for (const json& w : j.at("line_weights")) {
            LineWeight weight;
            weight.line.file = w.at("file").get<std::string>();
            weight.line.line = w.at("line").get<int>();
            weight.line.version = version_from_string(w.at("version").get<std::string>());
            weight.theta = w.at("theta").get<long long>();
            weight.phi = w.at("phi").get<double>();
            report.weights.push_back(std::move(weight));
        }
        for (const auto& [name, m] : j.at("metrics").items()) {
            auto kind = metric_from_name(name);
            if (!kind)
                throw ParseError(ParseError::Kind::Schema, "unknown metric in report: " + name);
            MetricReport mr;
            mr.verdict.metric = *kind;
            mr.verdict.delta_omega = m.at("delta_omega").get<double>();
            mr.verdict.abs_omega_total = m.value("abs_omega_total", 0.0);
            mr.verdict.breaking = m.at("breaking").get<bool>();
            mr.verdict.conclusive =
                conclusiveness_from_string(m.at("conclusive").get<std::string>());
            mr.verdict.conclusiveness_checked = m.value("conclusiveness_checked", true);
            mr.verdict.annotation = m.value("annotation", std::string{});
            for (const auto& [test, t] : m.at("tests").items()) {
                TestDelta delta;
                delta.test = test;
                delta.metric = *kind;
                delta.delta = t.at("delta").get<double>();
                delta.v1_summary = summary_from_json(t.at("v1"));
                delta.v2_summary = summary_from_json(t.at("v2"));
                mr.tests[test] = std::move(delta);
                if (t.contains("omega"))
                    mr.verdict.omega_per_test[test] = t.at("omega").get<double>();
                if (t.contains("capital_omega"))
                    mr.verdict.capital_omega_per_test[test] = t.at("capital_omega").get<double>();
                if (t.contains("conclusive"))
                    mr.test_conclusive[test] =
                        conclusiveness_from_string(t.at("conclusive").get<std::string>());
            }
            report.metrics[*kind] = std::move(mr);
        }
        report.ranking = ranking_from_json(j.at("ranking"));
        report.plan_digest = j.at("plan_digest").get<std::string>();
    } catch (const json::exception& e) {
        throw ParseError(ParseError::Kind::Schema, std::string("bad report: ") + e.what());
    }
    return report;
}

void save_report(const DeltaReport& report, const std::filesystem::path& path) {
    write_text_file(path, canonical_dump(report_to_json(report)));
}

DeltaReport load_report(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path))
        throw ParseError(ParseError::Kind::FileNotFound, "report not found: " + path.string());
    try {
        return report_from_json(json::parse(read_text_file(path)));
    } catch (const json::parse_error& e) {
        throw ParseError(ParseError::Kind::BadJson,
                         "malformed report " + path.string() + ": " + e.what());
    }
}

bool structurally_equal(const DeltaReport& a, const DeltaReport& b) {
    return report_to_json(a) == report_to_json(b);
}

std::string render_table(const DeltaReport& report) {
    std::ostringstream out;
    out << "verdict: " << report.verdict << " (exit " << report.exit_code() << ")\n";
    out << "verdict metric: " << metric_name(report.verdict_metric)
        << "  threshold: " << report.threshold
        << "  aggregator: " << to_string(report.aggregator) << "\n";
    out << "selected tests: " << report.selection.selected.size()
        << "  discarded as modified: " << report.selection.discarded_modified.size() << "\n";

    if (!report.weights.empty()) {
        out << "\nline weights (theta/Theta):\n";
        for (const LineWeight& w : report.weights) {
            std::ostringstream loc;
            loc << w.line.file << ":" << w.line.line << " @" << to_string(w.line.version);
            out << "  " << std::left << std::setw(40) << loc.str() << std::right
                << " theta=" << std::setw(6) << w.theta << "  phi=" << std::fixed
                << std::setprecision(4) << w.phi << "\n";
            out.unsetf(std::ios::fixed);
        }
    }

    auto metric_it = report.metrics.find(report.verdict_metric);
    if (metric_it != report.metrics.end()) {
        const MetricReport& mr = metric_it->second;
        out << "\nper-test " << metric_name(report.verdict_metric) << ":\n";
        out << "  " << std::left << std::setw(24) << "test" << std::right << std::setw(14)
            << "delta" << std::setw(10) << "omega" << std::setw(14) << "Omega" << std::setw(24)
            << "conclusive"
            << "  stable(v1/v2)\n";
        for (const auto& [test, delta] : mr.tests) {
            double omega = 0.0;
            double capital = 0.0;
            if (auto it = mr.verdict.omega_per_test.find(test);
                it != mr.verdict.omega_per_test.end())
                omega = it->second;
            if (auto it = mr.verdict.capital_omega_per_test.find(test);
                it != mr.verdict.capital_omega_per_test.end())
                capital = it->second;
            std::string conclusive = "-";
            if (auto it = mr.test_conclusive.find(test); it != mr.test_conclusive.end())
                conclusive = to_string(it->second);
            out << "  " << std::left << std::setw(24) << test << std::right << std::setw(14)
                << std::setprecision(6) << delta.delta << std::setw(10) << std::setprecision(4)
                << omega << std::setw(14) << std::setprecision(6) << capital << std::setw(24)
                << conclusive << "  "
                << (is_stable(delta.v1_summary, report.cv_threshold, report.qcd_threshold) ? "yes"
                                                                                           : "no")
                << "/"
                << (is_stable(delta.v2_summary, report.cv_threshold, report.qcd_threshold) ? "yes"
                                                                                           : "no")
                << "\n";
        }
        out << "\ndelta_omega per metric:\n";
        for (const auto& [metric, m] : report.metrics)
            out << "  " << std::left << std::setw(18) << metric_name(metric) << std::right
                << std::setw(16) << std::setprecision(8) << m.verdict.delta_omega
                << (m.verdict.breaking ? "  [breaking]" : "") << "  ("
                << to_string(m.verdict.conclusive) << ")\n";
    }

    if (!report.ranking.entries.empty()) {
        out << "\nsuspiciousness ranking:\n";
        int rank = 1;
        for (const RankedLine& e : report.ranking.entries) {
            out << "  " << std::setw(3) << rank++ << ". " << std::fixed << std::setprecision(4)
                << e.score << "  " << e.line.file << ":" << e.line.line << " @"
                << to_string(e.line.version) << "\n";
            out.unsetf(std::ios::fixed);
        }
    }
    return out.str();
}

} // namespace edelta
