#include "acb/concentration.hpp"

#include <algorithm>
#include <cmath>

#include "acb/errors.hpp"
#include "acb/stats.hpp"

namespace acb {

namespace {

double noise_scale(std::size_t n, double h) {
    const double nd = static_cast<double>(n);
    return std::sqrt(std::log(nd) / (nd * h));
}

}  // namespace

BorellBound borell_bound(double u, std::size_t n, double h, double sigma, double c1, double c2) {
    if (n == 0 || !(h > 0.0) || !(sigma > 0.0)) throw DomainError("borell_bound needs positive n, h and sigma");
    if (!(c1 > 0.0)) throw DomainError("borell_bound needs c1 > 0");
    const double s = noise_scale(n, h);
    BorellBound b;
    if (u < c2 * s) return b;
    const double excess = u / s - c2;
    b.in_range = true;
    b.value = 2.0 * std::exp(-std::log(static_cast<double>(n)) / (2.0 * sigma * c1) * excess * excess);
    return b;
}

double kerk_bound(double C, std::size_t n, double sigma, double c1) {
    return 2.0 * std::pow(static_cast<double>(n), -C * C / (2.0 * sigma * c1));
}

TailConstants tail_constants(std::size_t n, double h, const LocalPolyConfig& config, double sigma,
                             std::size_t pilot_reps, std::uint64_t seed, const ReplicateExecutor& executor) {
    TailConstants c;
    c.c1 = weight_diagnostics(n, h, config).c1();
    c.c2 = fit_variance_constant(n, h, config, sigma, pilot_reps, seed, executor);
    return c;
}

std::vector<double> default_sweep(std::size_t n, double h, double c2) {
    const double scale = c2 * noise_scale(n, h);
    std::vector<double> u(9);
    for (std::size_t k = 0; k < u.size(); ++k) u[k] = scale * (1.0 + static_cast<double>(k) / 4.0);
    return u;
}

std::vector<double> centered_sups(const TruthFunction& f, std::size_t n, double h, const LocalPolyConfig& config,
                                  double sigma, std::size_t reps, std::uint64_t seed,
                                  const ReplicateExecutor& executor) {
    if (sigma < 0.0) throw DomainError("noise level must be nonnegative");
    const LocalPolySmoother smoother(n, h, config, UniformGrid::refined(n, 4));
    const auto truth = f.on_design(n);
    const auto mean = smoother.apply(truth);
    std::vector<double> sups(reps, 0.0);
    executor(reps, [&](std::size_t rep) {
        auto y = truth;
        add_noise(y, sigma, seed, rep);
        const auto fit = smoother.apply(y);
        double sup = 0.0;
        for (std::size_t k = 0; k < fit.size(); ++k) sup = std::max(sup, std::abs(fit[k] - mean[k]));
        sups[rep] = sup;
    });
    return sups;
}

std::vector<TailReport> empirical_tail(const TruthFunction& f, std::size_t n, double h, const LocalPolyConfig& config,
                                       double sigma, std::span<const double> u, const TailConstants& constants,
                                       std::size_t reps, std::uint64_t seed, const ReplicateExecutor& executor) {
    if (reps < 1000) throw ConfigError("empirical tails need at least 1000 replicates");
    const auto sups = centered_sups(f, n, h, config, sigma, reps, seed, executor);
    const auto diag = weight_diagnostics(n, h, config);
    const double nh = static_cast<double>(n) * h;

    std::vector<TailReport> out;
    for (const double level : u) {
        TailReport r;
        r.u = level;
        r.n = n;
        r.h = h;
        r.sigma = sigma;
        r.c1 = constants.c1;
        r.c2 = constants.c2;
        r.reps = reps;
        r.seed = seed;
        r.sigma0_sq = sigma * sigma * constants.c1 * constants.c1 / nh;
        r.max_variance = sigma * sigma * diag.max_sq_sum;
        const auto hits = std::count_if(sups.begin(), sups.end(), [&](double s) { return s >= level; });
        r.empirical = static_cast<double>(hits) / static_cast<double>(reps);
        r.se = stats::binomial_se(r.empirical, reps);
        if (sigma > 0.0) {
            const auto b = borell_bound(level, n, h, sigma, constants.c1, constants.c2);
            r.bound = b.value;
            r.in_range = b.in_range;
        } else {
            r.bound = level > 0.0 ? 0.0 : 1.0;
            r.in_range = level > 0.0;
        }
        out.push_back(r);
    }
    return out;
}

}  // namespace acb
