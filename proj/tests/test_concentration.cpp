#include <doctest.h>

#include <cmath>

#include "acb/concentration.hpp"
#include "acb/errors.hpp"

using namespace acb;

TEST_CASE("Borell bound values") {
    const std::size_t n = 100;
    const double h = 0.1;
    const double s = std::sqrt(std::log(100.0) / 10.0);
    const double c2 = 1.3;

    const auto edge = borell_bound(c2 * s, n, h, 1.0, 1.0, c2);
    CHECK(edge.in_range);
    CHECK(edge.value == 2.0);

    // (u / s - c2)^2 = 2 sigma c1
    const auto mid = borell_bound((c2 + std::sqrt(2.0)) * s, n, h, 1.0, 1.0, c2);
    CHECK(mid.value == doctest::Approx(0.02));

    const auto below = borell_bound(0.5 * c2 * s, n, h, 1.0, 1.0, c2);
    CHECK(!below.in_range);
    CHECK(below.value == 1.0);

    double prev = 2.0;
    for (int k = 1; k <= 40; ++k) {
        const double v = borell_bound((c2 + 0.1 * k) * s, n, h, 1.0, 2.0, c2).value;
        CHECK(v < prev);
        prev = v;
    }
    CHECK_THROWS_AS(borell_bound(1.0, 0, h, 1.0, 1.0, c2), DomainError);
    CHECK_THROWS_AS(borell_bound(1.0, n, 0.0, 1.0, 1.0, c2), DomainError);
    CHECK_THROWS_AS(borell_bound(1.0, n, h, 0.0, 1.0, c2), DomainError);
}

TEST_CASE("tail at excess C") {
    CHECK(kerk_bound(0.0, 100, 1.0, 1.0) == 2.0);
    CHECK(kerk_bound(std::sqrt(2.0), 100, 1.0, 1.0) == doctest::Approx(0.02));
    const double C = 0.7;
    CHECK(kerk_bound(2.0 * C, 500, 1.5, 2.0) == doctest::Approx(2.0 * std::pow(500.0, -4.0 * C * C / 6.0)));
}

TEST_CASE("empirical tails") {
    const std::size_t n = 1024;
    const double h = 0.0625;
    const LocalPolyConfig config;
    const auto constants = tail_constants(n, h, config, 1.0, 300, 101);
    CHECK(constants.c1 >= 1.0);
    CHECK(constants.c2 > 0.0);
    const auto u = default_sweep(n, h, constants.c2);
    REQUIRE(u.size() == 9);
    CHECK(u.back() == doctest::Approx(3.0 * u.front()));

    const auto zero = empirical_tail(parse_truth("zero"), n, h, config, 1.0, u, constants, 1000, 7);
    const auto sine = empirical_tail(parse_truth("sine"), n, h, config, 1.0, u, constants, 1000, 7);
    REQUIRE(zero.size() == 9);
    for (std::size_t k = 0; k < u.size(); ++k) {
        CHECK(zero[k].empirical == sine[k].empirical);
        CHECK(zero[k].dominated());
        CHECK(zero[k].max_variance <= zero[k].sigma0_sq);
        CHECK(zero[k].empirical >= 0.0);
        CHECK(zero[k].empirical <= 1.0);
        if (k > 0) CHECK(zero[k].empirical <= zero[k - 1].empirical);
    }

    const auto quiet = empirical_tail(parse_truth("sine"), n, h, config, 0.0, u, constants, 1000, 7);
    for (const auto& r : quiet) CHECK(r.empirical == 0.0);

    CHECK_THROWS_AS(empirical_tail(parse_truth("zero"), n, h, config, 1.0, u, constants, 999, 7), ConfigError);
}

TEST_CASE("centered sups depend on the noise only") {
    const LocalPolyConfig config;
    const auto a = centered_sups(parse_truth("zero"), 512, 0.1, config, 1.0, 20, 4);
    const auto b = centered_sups(parse_truth("sine"), 512, 0.1, config, 1.0, 20, 4);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-10));
}
