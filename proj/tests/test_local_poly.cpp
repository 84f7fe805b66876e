#include <doctest.h>

#include <cmath>
#include <numeric>

#include "acb/errors.hpp"
#include "acb/local_poly.hpp"

using namespace acb;

namespace {

LocalPolyConfig cfg(int l, Kernel k) {
    LocalPolyConfig c;
    c.l = l;
    c.kernel = k;
    return c;
}

// Weighted least squares fit at x solved from scratch: minimize
// sum K(z_i) (y_i - sum_p b_p z_i^p)^2 via normal equations with Gaussian
// elimination, returning b_0.
double wls_intercept(std::span<const double> y, double h, int l, Kernel k, double x) {
    const std::size_t n = y.size();
    const int d = l + 1;
    std::vector<double> A(static_cast<std::size_t>(d * (d + 1)), 0.0);
    for (std::size_t i = 1; i <= n; ++i) {
        const double z = (static_cast<double>(i) / n - x) / h;
        const double w = kernel_value(k, z);
        if (w == 0.0) continue;
        for (int p = 0; p < d; ++p) {
            for (int q = 0; q < d; ++q) A[p * (d + 1) + q] += w * std::pow(z, p + q);
            A[p * (d + 1) + d] += w * std::pow(z, p) * y[i - 1];
        }
    }
    for (int c = 0; c < d; ++c) {
        int piv = c;
        for (int r = c + 1; r < d; ++r) {
            if (std::abs(A[r * (d + 1) + c]) > std::abs(A[piv * (d + 1) + c])) piv = r;
        }
        for (int q = 0; q <= d; ++q) std::swap(A[c * (d + 1) + q], A[piv * (d + 1) + q]);
        for (int r = 0; r < d; ++r) {
            if (r == c) continue;
            const double f = A[r * (d + 1) + c] / A[c * (d + 1) + c];
            for (int q = 0; q <= d; ++q) A[r * (d + 1) + q] -= f * A[c * (d + 1) + q];
        }
    }
    return A[d] / A[0];
}

}  // namespace

TEST_CASE("global mean for the rectangular kernel with a full window") {
    const auto w = weights(50, 1.5, cfg(0, Kernel::rectangular), 0.37);
    for (const double v : w) CHECK(v == doctest::Approx(1.0 / 50.0).epsilon(1e-12));
}

TEST_CASE("weights sum to one and vanish outside the window") {
    for (const int l : {0, 1, 2, 3}) {
        for (const auto k : {Kernel::rectangular, Kernel::epanechnikov}) {
            for (const double x : {0.0, 0.013, 0.5, 0.77, 1.0}) {
                const std::size_t n = 200;
                const double h = 0.08;
                const auto w = weights(n, h, cfg(l, k), x);
                CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-10));
                for (std::size_t i = 1; i <= n; ++i) {
                    if (std::abs(static_cast<double>(i) / n - x) > h * (1.0 + 1e-9)) CHECK(w[i - 1] == 0.0);
                }
            }
        }
    }
}

TEST_CASE("weights agree with an independent least-squares fit") {
    std::vector<double> y(120);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::sin(0.37 * i) + 0.01 * i;
    for (const int l : {0, 1, 2}) {
        for (const double x : {0.0, 0.21, 0.5, 0.99}) {
            const auto w = weights(y.size(), 0.1, cfg(l, Kernel::epanechnikov), x);
            const double est = std::inner_product(w.begin(), w.end(), y.begin(), 0.0);
            CHECK(est == doctest::Approx(wls_intercept(y, 0.1, l, Kernel::epanechnikov, x)).epsilon(1e-9));
        }
    }
}

TEST_CASE("epanechnikov weights are continuous in x") {
    const auto c = cfg(2, Kernel::epanechnikov);
    const double dx = 1e-7;
    for (const double x : {0.2, 0.2 + 1.0 / 300.0, 0.5}) {
        const auto a = weights(300, 0.05, c, x);
        const auto b = weights(300, 0.05, c, x + dx);
        double diff = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
        CHECK(diff < 1e-3);
    }
}

TEST_CASE("too small a bandwidth is reported") {
    CHECK_THROWS_AS(weights(100, 0.005, cfg(2, Kernel::epanechnikov), 0.5), BandwidthTooSmall);
    CHECK_THROWS_AS(LocalPolySmoother(100, 0.012, cfg(2, Kernel::epanechnikov), UniformGrid::design(100)),
                    BandwidthTooSmall);
    CHECK_THROWS_AS(weights(100, -0.1, cfg(0, Kernel::epanechnikov), 0.5), DomainError);
    LocalPolyConfig bad;
    bad.ridge_eps = 1e-3;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("smoother matches direct weights on several grids") {
    const std::size_t n = 300;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = std::cos(0.1 * i) + (i % 7) * 0.3;
    for (const auto& grid : {UniformGrid::design(n), UniformGrid::refined(n, 4), UniformGrid::dyadic(7)}) {
        for (const double h : {0.03, 0.1, 0.4}) {
            const auto c = cfg(2, Kernel::epanechnikov);
            const LocalPolySmoother s(n, h, c, grid);
            const auto fast = s.apply(y);
            for (std::size_t k = 0; k < grid.count; k += 7) {
                const auto w = weights(n, h, c, grid.at(k));
                const double direct = std::inner_product(w.begin(), w.end(), y.begin(), 0.0);
                CHECK(fast[k] == doctest::Approx(direct).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("linear truth is reproduced on the interior") {
    const auto lin = parse_truth("linear");
    const auto sample = simulate(lin, 512, 0.0, 1);
    const double h = 0.1;
    const auto est = estimate(sample, h, cfg(1, Kernel::epanechnikov));
    double err = 0.0;
    for (std::size_t k = 0; k < est.grid.count; ++k) {
        const double x = est.grid.at(k);
        if (x >= h && x <= 1.0 - h) err = std::max(err, std::abs(est.values[k] - x));
    }
    CHECK(err < 1e-10);

    const auto m = exact_mean(lin, 512, h, cfg(1, Kernel::epanechnikov), UniformGrid::design(512));
    CHECK(m.values == est.values);
}

TEST_CASE("constants are reproduced everywhere") {
    FixedDesignSample s;
    s.n = 256;
    s.y.assign(256, 2.5);
    const auto est = estimate(s, 0.07, cfg(2, Kernel::epanechnikov), UniformGrid::refined(256, 4));
    for (const double v : est.values) CHECK(v == doctest::Approx(2.5).epsilon(1e-10));
}

TEST_CASE("zero truth has zero mean curve and estimates are linear") {
    const auto m = exact_mean(parse_truth("zero"), 128, 0.2, cfg(2, Kernel::epanechnikov), UniformGrid::design(128));
    for (const double v : m.values) CHECK(v == 0.0);

    const auto a = simulate(parse_truth("sine"), 256, 1.0, 5);
    const auto b = simulate(parse_truth("zero"), 256, 1.0, 6);
    FixedDesignSample sum = a;
    for (std::size_t i = 0; i < sum.y.size(); ++i) sum.y[i] += b.y[i];
    const LocalPolySmoother s(256, 0.1, cfg(2, Kernel::epanechnikov), UniformGrid::design(256));
    const auto ea = s.apply(a.y);
    const auto eb = s.apply(b.y);
    const auto es = s.apply(sum.y);
    for (std::size_t k = 0; k < es.size(); ++k) CHECK(std::abs(es[k] - ea[k] - eb[k]) < 1e-12);
}

TEST_CASE("weight diagnostics") {
    const auto d = weight_diagnostics(100, 0.25, cfg(0, Kernel::rectangular));
    CHECK(d.c1_sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.locality_ok);
    CHECK(d.grid_points == 401);
    CHECK(d.variance_proxy == doctest::Approx(std::sqrt(std::log(100.0) / 25.0)));

    for (const int l : {0, 1, 2}) {
        const auto e = weight_diagnostics(256, 0.1, cfg(l, Kernel::epanechnikov));
        CHECK(e.locality_ok);
        CHECK(e.poly_repro_err < 1e-9);
        CHECK(std::isfinite(e.c1_sup));
        CHECK(e.c1_sum >= 1.0);
        CHECK(e.max_sq_sum <= e.c1() * e.c1() / (256 * 0.1));
    }
}
