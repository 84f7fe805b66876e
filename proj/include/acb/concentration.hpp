#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "acb/executor.hpp"
#include "acb/local_poly.hpp"
#include "acb/regression.hpp"

namespace acb {

struct BorellBound {
    double value = 1.0;
    bool in_range = false;  // u >= c2 sqrt(ln n / (nh)); otherwise value is the trivial 1
};

// 2 exp(-(ln n / (2 sigma c1)) (u / sqrt(ln n / (nh)) - c2)^2) for the
// centered smoother G_n = f_n(h) - E f_n(h). Throws DomainError for
// nonpositive n, h or sigma.
BorellBound borell_bound(double u, std::size_t n, double h, double sigma, double c1, double c2);

// 2 n^{-C^2 / (2 sigma c1)}: the tail at u = (c2 + C) sqrt(ln n / (nh)).
double kerk_bound(double C, std::size_t n, double sigma, double c1);

struct TailConstants {
    double c1 = 0.0;  // max(c1_sup, c1_sum) from the weight diagnostics
    double c2 = 0.0;  // RMS fit of ||G_n|| / sqrt(ln n / (nh)) under noise level sigma
};

// Pilot constants. c2 uses its own seed so it is independent of the tail run.
TailConstants tail_constants(std::size_t n, double h, const LocalPolyConfig& config, double sigma,
                             std::size_t pilot_reps, std::uint64_t seed,
                             const ReplicateExecutor& executor = serial_executor());

// u_k = scale (1 + k / 4), k = 0..8, with scale = c2 sqrt(ln n / (nh)):
// the sweep from c2 to 3 c2 in units of the noise scale.
std::vector<double> default_sweep(std::size_t n, double h, double c2);

struct TailReport {
    double u = 0.0;
    double empirical = 0.0;  // fraction of replicates with ||G_n|| >= u
    double se = 0.0;
    double bound = 0.0;
    bool in_range = false;
    double sigma0_sq = 0.0;  // sigma^2 c1^2 / (nh)
    double max_variance = 0.0;  // sup_x sigma^2 sum_i W_ni(x)^2
    std::size_t n = 0;
    double h = 0.0;
    double sigma = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    std::size_t reps = 0;
    std::uint64_t seed = 0;

    bool dominated() const { return empirical <= bound; }
};

// Simulates Y = f + sigma eps, centers f_n(h) by the exact mean on the
// (4n + 1)-point grid and reports the exceedance fraction of the grid sup for
// every u. With sigma = 0 the exact tail (0 for u > 0) is used as the bound.
// Replicate k draws its noise from counter block k of `seed`. Throws
// ConfigError for reps < 1000.
std::vector<TailReport> empirical_tail(const TruthFunction& f, std::size_t n, double h, const LocalPolyConfig& config,
                                       double sigma, std::span<const double> u, const TailConstants& constants,
                                       std::size_t reps, std::uint64_t seed,
                                       const ReplicateExecutor& executor = serial_executor());

// Grid sups ||G_n||_inf for each replicate, in replicate order.
std::vector<double> centered_sups(const TruthFunction& f, std::size_t n, double h, const LocalPolyConfig& config,
                                  double sigma, std::size_t reps, std::uint64_t seed,
                                  const ReplicateExecutor& executor = serial_executor());

}  // namespace acb
