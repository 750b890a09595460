// Small statistics toolbox: mergeable moment accumulators, Kolmogorov-Smirnov
// tests, normal CDF and ordinary least squares.
#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace perthull {

// Count/mean/M2 accumulator with an associative merge, so parallel
// reductions give the same answer in any grouping (up to float rounding).
struct RunningMoments {
    long long count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++count;
        const double delta = x - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (x - mean);
    }
    void merge(const RunningMoments& o) {
        if (o.count == 0) return;
        if (count == 0) {
            *this = o;
            return;
        }
        const double n1 = static_cast<double>(count), n2 = static_cast<double>(o.count);
        const double delta = o.mean - mean;
        const double n = n1 + n2;
        mean += delta * n2 / n;
        m2 += o.m2 + delta * delta * n1 * n2 / n;
        count += o.count;
    }
    double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
    double stderr_mean() const;
};

double normal_cdf(double x);

// Sample skewness and excess kurtosis with their large-sample standard errors.
struct ShapeStats {
    double skewness = 0.0;
    double skewness_se = 0.0;
    double excess_kurtosis = 0.0;
    double kurtosis_se = 0.0;
};
ShapeStats shape_statistics(const std::vector<double>& sample);

// One-sample KS statistic of `sample` against the given CDF.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);

// Two-sided asymptotic p-value for a KS statistic at sample size n.
double ks_pvalue(std::size_t n, double d);

struct OlsFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double residual_sd = 0.0;
};
OlsFit ols_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace perthull
