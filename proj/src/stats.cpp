#include "acb/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "acb/errors.hpp"

namespace acb::stats {

MeanSe mean_se(std::span<const double> v) {
    MeanSe out;
    if (v.empty()) return out;
    double sum = 0.0;
    for (const double x : v) sum += x;
    out.mean = sum / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (const double x : v) ss += (x - out.mean) * (x - out.mean);
        out.se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    }
    return out;
}

double binomial_se(double p, std::size_t reps) {
    if (reps == 0) return 0.0;
    return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(reps));
}

double order_quantile(std::vector<double> v, double p) {
    if (v.empty()) throw ConfigError("quantile of an empty sample");
    if (!(p > 0.0 && p <= 1.0)) throw ConfigError("quantile level must lie in (0, 1]");
    std::sort(v.begin(), v.end());
    const auto k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(v.size()) - 1e-12));
    return v[std::clamp<std::size_t>(k, 1, v.size()) - 1];
}

std::optional<std::size_t> upper_tolerance_rank(std::size_t R, double q, double confidence) {
    if (R == 0) return std::nullopt;
    const boost::math::binomial_distribution<double> below(static_cast<double>(R), 1.0 - q);
    for (std::size_t k = 1; k <= R; ++k) {
        // P(Binomial >= k) = 1 - cdf(k - 1)
        const double tail = boost::math::cdf(boost::math::complement(below, static_cast<double>(k - 1)));
        if (tail <= 1.0 - confidence) return k;
    }
    return std::nullopt;
}

LinearFit ols(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ConfigError("regression needs at least two paired points");
    const auto n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw ConfigError("regression needs at least two distinct x values");
    LinearFit fit;
    fit.points = x.size();
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (x.size() > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double e = y[i] - fit.intercept - fit.slope * x[i];
            rss += e * e;
        }
        fit.slope_se = std::sqrt(rss / (n - 2.0) / sxx);
        const boost::math::students_t dist(n - 2.0);
        const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
        fit.ci_low = fit.slope - t * fit.slope_se;
        fit.ci_high = fit.slope + t * fit.slope_se;
    } else {
        fit.ci_low = fit.ci_high = fit.slope;
    }
    return fit;
}

LinearFit loglog_fit(std::span<const double> x, std::span<const double> y) {
    std::vector<double> lx(x.size());
    std::vector<double> ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) lx[i] = std::log(x[i]);
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!(y[i] > 0.0)) throw DomainError("log-log fit needs positive responses");
        ly[i] = std::log(y[i]);
    }
    return ols(lx, ly);
}

}  // namespace acb::stats
