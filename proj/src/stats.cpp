#include "edelta/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace edelta {

const char* to_string(Conclusiveness c) {
    switch (c) {
    case Conclusiveness::Inconclusive: return "inconclusive";
    case Conclusiveness::ConclusiveIncrease: return "conclusive-increase";
    case Conclusiveness::ConclusiveDecrease: return "conclusive-decrease";
    }
    return "inconclusive";
}

double mean(std::span<const double> xs) {
    if (xs.empty())
        throw EmptySample();
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double median(std::span<const double> xs) {
    if (xs.empty())
        throw EmptySample();
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    if (n % 2 == 1)
        return sorted[n / 2];
    return (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
}

double population_stddev(std::span<const double> xs) {
    if (xs.empty())
        throw EmptySample();
    // Constant samples have exactly zero dispersion; the mean of n equal
    // values can round away from them otherwise.
    const auto [min_it, max_it] = std::minmax_element(xs.begin(), xs.end());
    if (*min_it == *max_it)
        return 0.0;
    const double mu = mean(xs);
    double sum_sq = 0.0;
    for (double x : xs) {
        const double d = x - mu;
        sum_sq += d * d;
    }
    return std::sqrt(sum_sq / static_cast<double>(xs.size()));
}

double coefficient_of_variation(std::span<const double> xs) {
    const double mu = mean(xs);
    if (mu == 0.0)
        throw ZeroMean();
    return population_stddev(xs) / mu;
}

double quantile(std::span<const double> xs, double p) {
    if (xs.empty())
        throw EmptySample();
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.size() == 1)
        return sorted[0];
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= sorted.size())
        return sorted.back();
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double quartile_coefficient_of_dispersion(std::span<const double> xs) {
    if (xs.size() < 4)
        throw SampleTooSmall("quartile coefficient of dispersion needs at least 4 samples");
    const double q1 = quantile(xs, 0.25);
    const double q3 = quantile(xs, 0.75);
    if (q1 + q3 == 0.0)
        throw DegenerateQuartiles();
    return (q3 - q1) / (q3 + q1);
}

Conclusiveness ranges_disjoint(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty())
        throw EmptySample();
    const auto [a_min, a_max] = std::minmax_element(a.begin(), a.end());
    const auto [b_min, b_max] = std::minmax_element(b.begin(), b.end());
    if (*a_max < *b_min)
        return Conclusiveness::ConclusiveIncrease;
    if (*b_max < *a_min)
        return Conclusiveness::ConclusiveDecrease;
    return Conclusiveness::Inconclusive;
}

StabilitySummary summarize(std::span<const double> xs) {
    if (xs.empty())
        throw EmptySample();
    StabilitySummary s;
    s.n = xs.size();
    s.mean = mean(xs);
    s.stddev = population_stddev(xs);
    const auto [min_it, max_it] = std::minmax_element(xs.begin(), xs.end());
    s.min = *min_it;
    s.max = *max_it;
    s.q1 = quantile(xs, 0.25);
    s.q3 = quantile(xs, 0.75);
    if (s.mean != 0.0)
        s.cv = s.stddev / s.mean;
    if (s.n >= 4 && s.q1 + s.q3 != 0.0)
        s.qcd = (s.q3 - s.q1) / (s.q3 + s.q1);
    return s;
}

bool is_stable(const StabilitySummary& s, double cv_threshold, double qcd_threshold) {
    if (s.cv && std::abs(*s.cv) <= cv_threshold)
        return true;
    if (s.qcd && std::abs(*s.qcd) <= qcd_threshold)
        return true;
    return false;
}

} // namespace edelta
