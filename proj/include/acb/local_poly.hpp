#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "acb/executor.hpp"
#include "acb/regression.hpp"

namespace acb {

enum class Kernel { rectangular, epanechnikov };

Kernel parse_kernel(std::string_view name);
std::string_view kernel_name(Kernel k);

// 1/2 on [-1, 1] (rectangular), 3/4 (1 - u^2)_+ (epanechnikov).
double kernel_value(Kernel k, double u);

struct LocalPolyConfig {
    int l = 2;
    Kernel kernel = Kernel::epanechnikov;
    // Added to the diagonal of the local design matrix only when the plain
    // system is numerically singular.
    double ridge_eps = 1e-9;

    void validate() const;
};

// Points (first + k) / denom, k = 0..count-1.
struct UniformGrid {
    std::size_t denom = 1;
    std::size_t first = 0;
    std::size_t count = 0;

    double at(std::size_t k) const { return static_cast<double>(first + k) / static_cast<double>(denom); }
    std::vector<double> points() const;

    static UniformGrid design(std::size_t n) { return {n, 1, n}; }
    static UniformGrid dyadic(int J) { return {std::size_t{1} << J, 0, std::size_t{1} << J}; }
    // mult * n + 1 points covering [0, 1] inclusive.
    static UniformGrid refined(std::size_t n, std::size_t mult) { return {mult * n, 0, mult * n + 1}; }

    bool operator==(const UniformGrid&) const = default;
};

struct CurveEstimate {
    enum class Provenance { raw, adaptive };

    UniformGrid grid;
    std::vector<double> values;
    double h = 0.0;
    Provenance provenance = Provenance::raw;
};

// W_ni(h, x), i = 1..n, with U(u) = (1, u, ..., u^l / l!) and the design rows
// z_i = (i/n - x) / h. Zero outside |i/n - x| <= h. Throws BandwidthTooSmall
// when fewer than l + 1 design points carry positive kernel weight.
std::vector<double> weights(std::size_t n, double h, const LocalPolyConfig& config, double x);

// Nonzero part of the weight row: W_ni(x) for i = first..first + values.size() - 1.
struct WeightRow {
    std::size_t first = 1;
    std::vector<double> values;
};
WeightRow weight_row(std::size_t n, double h, const LocalPolyConfig& config, double x);

// Linear smoother y -> (sum_i W_ni(x_k) y_i)_k for fixed (n, h, config, grid).
// Kernel sums are evaluated as correlations on the common lattice of the
// design and the grid (FFT based); the local systems are solved once at
// construction. Immutable after construction and safe to share between
// threads.
class LocalPolySmoother {
public:
    LocalPolySmoother(std::size_t n, double h, const LocalPolyConfig& config, const UniformGrid& grid);
    ~LocalPolySmoother();
    LocalPolySmoother(const LocalPolySmoother&) = delete;
    LocalPolySmoother& operator=(const LocalPolySmoother&) = delete;

    std::vector<double> apply(std::span<const double> y) const;

    std::size_t n() const { return n_; }
    double h() const { return h_; }
    const UniformGrid& grid() const { return grid_; }
    const LocalPolyConfig& config() const { return config_; }

private:
    struct Impl;
    std::size_t n_;
    double h_;
    LocalPolyConfig config_;
    UniformGrid grid_;
    std::unique_ptr<Impl> impl_;
};

CurveEstimate estimate(const FixedDesignSample& sample, double h, const LocalPolyConfig& config,
                       const UniformGrid& grid);
CurveEstimate estimate(const FixedDesignSample& sample, double h, const LocalPolyConfig& config);

// sum_i W_ni(x) f(i/n): the mean of the estimator under truth f.
CurveEstimate exact_mean(const TruthFunction& f, std::size_t n, double h, const LocalPolyConfig& config,
                         const UniformGrid& grid);

struct WeightDiagnostics {
    double c1_sup = 0.0;            // sup_{i,x} nh |W_ni(x)|
    double c1_sum = 0.0;            // sup_x sum_i |W_ni(x)|
    bool locality_ok = false;       // W_ni(x) = 0 whenever |i/n - x| > h
    double poly_repro_err = 0.0;    // degree <= l monomials, x in [h, 1 - h]
    double bias_bound_const = 0.0;  // sup_x sum_i |W_ni(x)| |z_i|^{l+1} / (l+1)!
    double variance_proxy = 0.0;    // sqrt(ln n / (nh))
    double max_sq_sum = 0.0;        // sup_x sum_i W_ni(x)^2
    std::size_t grid_points = 0;

    // max(c1_sup, c1_sum): the single constant used by the tail bounds.
    double c1() const { return c1_sup > c1_sum ? c1_sup : c1_sum; }
};

// Evaluated on the (4n + 1)-point grid covering [0, 1].
WeightDiagnostics weight_diagnostics(std::size_t n, double h, const LocalPolyConfig& config);

// c2 with E ||f_n - E f_n||_inf^2 = c2^2 ln n / (nh), fitted by Monte Carlo
// under pure noise of level sigma on the (4n + 1)-point grid.
double fit_variance_constant(std::size_t n, double h, const LocalPolyConfig& config, double sigma, std::size_t reps,
                             std::uint64_t seed, const ReplicateExecutor& executor = serial_executor());

}  // namespace acb
