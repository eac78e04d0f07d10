#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "edelta/errors.hpp"

namespace edelta {

struct EmptySample : Error {
    EmptySample() : Error("empty sample") {}
};

struct ZeroMean : Error {
    ZeroMean() : Error("coefficient of variation undefined: mean is zero") {}
};

struct SampleTooSmall : Error {
    using Error::Error;
};

struct DegenerateQuartiles : Error {
    DegenerateQuartiles() : Error("quartile coefficient undefined: Q1 + Q3 is zero") {}
};

// Outcome of the range-intersection rule: a measured difference is
// attributable to the code change only when the observed v1 and v2 ranges
// are disjoint. A shared endpoint counts as intersection.
enum class Conclusiveness {
    Inconclusive,
    ConclusiveIncrease,
    ConclusiveDecrease,
};

const char* to_string(Conclusiveness c);

// Per-sample stability indicators. cv is undefined when the mean is zero,
// qcd when n < 4 or Q1 + Q3 == 0; both stay nullopt in those cases.
struct StabilitySummary {
    double mean = 0.0;
    double stddev = 0.0;
    std::optional<double> cv;
    std::optional<double> qcd;
    double q1 = 0.0;
    double q3 = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::size_t n = 0;
};

double mean(std::span<const double> xs);
double median(std::span<const double> xs);

// Population form: sqrt(sum((x_i - mean)^2) / N).
double population_stddev(std::span<const double> xs);

// stddev / mean with the population stddev. Throws ZeroMean when mean == 0.
double coefficient_of_variation(std::span<const double> xs);

// Quantile by linear interpolation at rank p * (n - 1) on the sorted sample.
double quantile(std::span<const double> xs, double p);

// (Q3 - Q1) / (Q3 + Q1). Needs at least 4 samples.
double quartile_coefficient_of_dispersion(std::span<const double> xs);

Conclusiveness ranges_disjoint(std::span<const double> a, std::span<const double> b);

StabilitySummary summarize(std::span<const double> xs);

// Stability gate: a sample is stable when CV or QCD is at or below its
// threshold. Undefined indicators do not qualify.
bool is_stable(const StabilitySummary& s, double cv_threshold, double qcd_threshold);

} // namespace edelta
