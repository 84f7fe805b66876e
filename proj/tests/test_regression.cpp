#include <doctest.h>

#include <cmath>

#include "acb/errors.hpp"
#include "acb/random.hpp"
#include "acb/regression.hpp"

using namespace acb;

TEST_CASE("rate function") {
    CHECK(std::abs(rate(1.0, 1024) - 0.18907) < 1e-4);
    CHECK(std::abs(rate(2.0, 1024) - 0.13557) < 1e-4);
    for (std::size_t n = 3; n < 5000; n += 37) CHECK(rate(2.0, n) < rate(1.0, n));
    CHECK_THROWS_AS(rate(1.0, 2), DomainError);
    CHECK_THROWS_AS(rate(0.0, 100), DomainError);
}

TEST_CASE("simulate is exact without noise and deterministic with it") {
    const auto sine = parse_truth("sine");
    const auto clean = simulate(sine, 64, 0.0, 7);
    for (std::size_t i = 1; i <= 64; ++i) CHECK(clean.y[i - 1] == sine(static_cast<double>(i) / 64.0));

    const auto a = simulate(sine, 128, 1.0, 99, 3);
    const auto b = simulate(sine, 128, 1.0, 99, 3);
    CHECK(a.y == b.y);
    const auto c = simulate(sine, 128, 1.0, 99, 4);
    CHECK(a.y != c.y);

    const auto lin = parse_truth("linear");
    const auto design = simulate(lin, 4, 0.0, 1);
    CHECK(design.y == std::vector<double>{0.25, 0.5, 0.75, 1.0});
}

TEST_CASE("noise moments and independence") {
    const std::size_t N = 100000;
    const auto s = simulate(parse_truth("zero"), N, 2.0, 12345);
    double mean = 0.0;
    for (const double v : s.y) mean += v;
    mean /= N;
    double var = 0.0;
    double lag = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        var += (s.y[i] - mean) * (s.y[i] - mean);
        if (i + 1 < N) lag += (s.y[i] - mean) * (s.y[i + 1] - mean);
    }
    var /= N;
    lag /= (N - 1) * var;
    CHECK(std::abs(mean) < 4.0 * 2.0 / std::sqrt(static_cast<double>(N)));
    CHECK(std::abs(var / 4.0 - 1.0) < 0.05);
    CHECK(std::abs(lag) < 0.02);
}

TEST_CASE("normal stream fill matches pointwise access") {
    const rng::NormalStream s(77);
    std::vector<double> v(11);
    s.fill(5, v);
    for (std::size_t k = 0; k < v.size(); ++k) CHECK(v[k] == s.at(5 + k));
}

TEST_CASE("ball draws") {
    const auto db3 = wavelet::build_family("db3");
    const wavelet::HolderBall ball(2.0, 10.0);
    const auto f = random_ball_function(db3, ball, 10, 7);
    CHECK(wavelet::holder_norm(*f.coeffs, 2.0) <= 10.0);
    CHECK(wavelet::in_ball(*f.coeffs, wavelet::HolderBall(0.5, 10.0)));
    const auto g = random_ball_function(db3, ball, 10, 7);
    CHECK(*f.coeffs == *g.coeffs);
    const auto h = random_ball_function(db3, ball, 10, 8);
    CHECK_FALSE(*f.coeffs == *h.coeffs);

    const auto parsed = parse_truth("ball:t=2,B=10,seed=7,J=10");
    CHECK(*parsed.coeffs == *f.coeffs);
    CHECK(parsed(0.3) == f(0.3));
    CHECK(parsed.t == 2.0);
}

TEST_CASE("truth ids") {
    CHECK(parse_truth("zero")(0.4) == 0.0);
    CHECK(parse_truth(" linear ")(0.4) == 0.4);
    CHECK(parse_truth("sine")(0.25) == doctest::Approx(1.0));
    CHECK(parse_truth("cusp:t=0.5")(0.5) == 0.0);
    CHECK(parse_truth("cusp:t=0.5")(0.75) == doctest::Approx(0.5));
    CHECK(parse_truth("weierstrass:t=1,K=0")(0.0) == doctest::Approx(1.0));
    const auto spike = parse_truth("spike:j=5,m=3,r=1,family=haar");
    // Haar spike: 2^{-5 * 1.5} * 2^{5/2} psi(32 x - 3) = 2^{-5} on [3/32, 3.5/32).
    CHECK(spike(3.2 / 32.0) == doctest::Approx(std::exp2(-5.0)));
    CHECK(spike(3.7 / 32.0) == doctest::Approx(-std::exp2(-5.0)));
    CHECK(spike(0.5) == 0.0);
    CHECK(parse_truth_list("zero; sine ;linear").size() == 3);

    CHECK_THROWS_AS(parse_truth("bogus"), ConfigError);
    CHECK_THROWS_AS(parse_truth("ball:t=2"), ConfigError);
    CHECK_THROWS_AS(parse_truth("ball:t=2,B=1,seed=1,color=red"), ConfigError);
    CHECK_THROWS_AS(parse_truth("spike:j=2,m=1,r=1"), ConfigError);
    CHECK_THROWS_AS(parse_truth("sine:t=1"), ConfigError);
    CHECK_THROWS_AS(parse_truth_list(" ; "), ConfigError);
}
