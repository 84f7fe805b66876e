#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace acb::stats {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;  // sample standard deviation / sqrt(count)
};

MeanSe mean_se(std::span<const double> v);

// Standard error of a proportion estimated from `reps` Bernoulli draws.
double binomial_se(double p, std::size_t reps);

// ceil(p * R)-th smallest value (1-based); p in (0, 1].
double order_quantile(std::vector<double> v, double p);

// Smallest k (1-based) such that the k-th order statistic of R draws is an
// upper bound for the (1 - q) quantile with the given confidence, i.e.
// P(Binomial(R, 1 - q) >= k) <= 1 - confidence. Empty when even the sample
// maximum cannot be certified.
std::optional<std::size_t> upper_tolerance_rank(std::size_t R, double q, double confidence);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double ci_low = 0.0;   // 95% t interval for the slope
    double ci_high = 0.0;
    std::size_t points = 0;
};

// Ordinary least squares y = intercept + slope x. Needs at least two distinct x.
LinearFit ols(std::span<const double> x, std::span<const double> y);

// OLS of log(y) on log(x).
LinearFit loglog_fit(std::span<const double> x, std::span<const double> y);

}  // namespace acb::stats
