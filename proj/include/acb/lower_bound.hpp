#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "acb/band.hpp"
#include "acb/executor.hpp"
#include "acb/wavelet.hpp"

namespace acb {

// Spike-detection problem: H0 f = 0 against the disjoint spikes of level j.
struct TestingProblem {
    std::string family = "haar";
    int j = 0;
    double r = 1.0;
    std::size_t n = 0;
    double sigma = 1.0;
    double amp = 1.0;

    wavelet::SpikeSet spikes() const;
};

struct LikelihoodSample {
    std::vector<double> zeta;
    std::vector<double> xi;
    std::vector<double> alpha_sq;
    double z = 0.0;
    double log_z = 0.0;  // log Z_n, finite even when Z_n overflows
};

// sum_i f_m(i/n)^2
double alpha_sq(const wavelet::Spike& spike);

// xi = exp(alpha zeta / sigma - alpha^2 / (2 sigma^2))
double likelihood_ratio(double alpha, double zeta, double sigma);

// Statistics computed from observations y (length n): zeta_m =
// (alpha_m sigma)^{-1} sum_i f_m(x_i) y_i, xi_m and Z_n = mean(xi).
// Throws DomainError if some alpha_m is zero.
LikelihoodSample likelihood_from_data(const wavelet::SpikeSet& set, std::span<const double> y, double sigma);

// Draws pure noise (H0) with the given seed and replicate counter.
LikelihoodSample z_statistic(const TestingProblem& problem, std::uint64_t seed, std::uint64_t replicate = 0);

struct TestingRiskReport {
    std::string test_id;
    double type1 = 0.0;
    double worst_type2 = 0.0;
    double risk = 0.0;
    double type1_se = 0.0;
    double type2_se = 0.0;
    double se = 0.0;  // sqrt(type1_se^2 + type2_se^2)
    std::size_t worst_member = 0;  // spike index m of the worst alternative
    std::size_t replicates = 0;
    std::size_t alternatives = 0;
};

// Rejects H0 iff Z_n >= 1 - eta. Type II for every spike uses data simulated
// under that spike; replicate k shares its noise draw across alternatives.
// Throws ConfigError for reps < 500 or eta outside (0, 1).
TestingRiskReport lr_test_risk(const TestingProblem& problem, double eta, std::size_t reps, std::uint64_t seed,
                               const ReplicateExecutor& executor = serial_executor());

// Constant tests: never reject (reject = false) or always reject.
TestingRiskReport constant_test_risk(bool reject);

// 1 iff some spike lies inside the band at every grid point. Throws
// ShapeError when the spikes are tabulated on a different grid.
bool band_test(const ConfidenceBand& band, const wavelet::SpikeSet& spikes);

// Monte Carlo risk of the band-induced test. At most `max_alternatives`
// evenly spaced spikes are simulated under the alternative.
TestingRiskReport band_test_risk(const TestingProblem& problem, const BandBuilder& builder, std::size_t reps,
                                 std::size_t max_alternatives, std::uint64_t seed,
                                 const ReplicateExecutor& executor = serial_executor());

// round(log2(n / ln n) / (2r + 1)); n >= 8.
int jstar(std::size_t n, double r);

}  // namespace acb
