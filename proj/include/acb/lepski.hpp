#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "acb/executor.hpp"
#include "acb/local_poly.hpp"
#include "acb/regression.hpp"

namespace acb {

struct BandwidthGrid {
    double rho = 2.0;
    double floor = 0.0;          // (ln n)^2 / n
    double cap = 0.0;            // (ln n / n)^{1/(2l+1)}; meaningful when capped
    bool capped = false;
    std::vector<double> values;  // strictly decreasing, values[k] = rho^{-k0-k}
};

// {rho^{-k} : k >= 0, rho^{-k} > (ln n)^2 / n}, optionally keeping only
// values <= (ln n / n)^{1/(2l+1)}. Throws ConfigError when empty.
BandwidthGrid build_grid(std::size_t n, double rho, int l, bool capped);

struct LepskiResult {
    double h_hat = 0.0;
    std::size_t index = 0;  // position of h_hat in grid.values
    double M_const = 0.0;
    // pairwise[a][b] = ||f_n(h_a) - f_n(h_b)||_inf on the design grid for
    // a < b (h_a > h_b); zero elsewhere.
    std::vector<std::vector<double>> pairwise;
    CurveEstimate estimate;
};

// Threshold sqrt(M ln n / (n g)).
double lepski_threshold(double M, std::size_t n, double g);

// Holds one design-grid smoother per grid bandwidth. Immutable and shareable.
class LepskiSelector {
public:
    LepskiSelector(std::size_t n, BandwidthGrid grid, LocalPolyConfig config);

    std::size_t n() const { return n_; }
    const BandwidthGrid& grid() const { return grid_; }
    const LocalPolyConfig& config() const { return config_; }
    const LocalPolySmoother& smoother(std::size_t k) const { return *smoothers_[k]; }

    // Estimates at every grid bandwidth (design grid).
    std::vector<std::vector<double>> estimates(std::span<const double> y) const;

    // Largest h such that every smaller grid g passes the pairwise test;
    // min(grid) when nothing larger qualifies.
    LepskiResult select(std::span<const double> y, double M_const) const;

    // Smallest M for which select() returns max(grid) on this sample.
    double minimal_M_for_max(std::span<const double> y) const;

private:
    std::size_t n_;
    BandwidthGrid grid_;
    LocalPolyConfig config_;
    std::vector<std::unique_ptr<LocalPolySmoother>> smoothers_;
};

// Selection on a precomputed pairwise table.
std::size_t select_index(const std::vector<std::vector<double>>& pairwise, std::span<const double> h, double M_const,
                         std::size_t n);

LepskiResult select_bandwidth(const FixedDesignSample& sample, const BandwidthGrid& grid, const LocalPolyConfig& config,
                              double M_const);

// M such that under truth 0 the selector returns max(grid) in at least a
// `coverage` fraction of the replicates: the ceil(coverage * reps)-th order
// statistic of the per-replicate minimal M.
double calibrate_M(const LepskiSelector& selector, double sigma, std::size_t reps, std::uint64_t seed,
                   double coverage = 0.95, const ReplicateExecutor& executor = serial_executor());

// 16 (sqrt(2 sigma c1 K) + c2)^2.
double formula_M(double sigma, double c1, double c2, double K = 2.0);

struct AdaptiveParams {
    double rho = 2.0;
    bool capped = true;
    LocalPolyConfig config;
    double M_const = 0.0;
};

CurveEstimate adaptive_estimate(const FixedDesignSample& sample, const AdaptiveParams& params);

// Largest grid h with ||exact_mean(h) - f||_inf <= (sqrt(M) / 4) sqrt(ln n / (nh)).
// Test-only diagnostic.
double oracle_bandwidth(const TruthFunction& f, const LepskiSelector& selector, double M_const);

}  // namespace acb
