#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "acb/wavelet.hpp"

namespace acb {

// (ln n / n)^{t/(2t+1)}, natural logarithm. Throws DomainError for n <= 2 or
// t <= 0.
double rate(double t, std::size_t n);

struct TruthFunction {
    enum class Kind { analytic, coefficient, spike };

    std::string id;
    Kind kind = Kind::analytic;
    // Declared smoothness and radius, when the construction pins them down.
    std::optional<double> t;
    std::optional<double> B;
    // Wavelet expansion for coefficient-defined truths.
    std::shared_ptr<const wavelet::WaveletCoefficients> coeffs;
    std::shared_ptr<const wavelet::WaveletFamily> family;

    double operator()(double x) const { return eval_(x); }

    // f(i/n) for i = 1..n.
    std::vector<double> on_design(std::size_t n) const;

    // f((first + k) / denom) for k = 0..count-1.
    std::vector<double> on_lattice(std::size_t denom, std::size_t first, std::size_t count) const;

    std::function<double(double)> eval_;
};

// Truth ids:
//   zero | linear | sine | weierstrass:t=1.5[,K=12] | cusp:t=0.5
//   ball:t=2,B=10,seed=7[,J=12][,family=db3]
//   spike:j=5,m=3,r=1[,amp=1][,family=db3]
// Throws ConfigError for anything unresolvable.
TruthFunction parse_truth(std::string_view id);

// ';'-separated list of truth ids.
std::vector<TruthFunction> parse_truth_list(std::string_view list);

// Uniform draw from the coefficient box of the ball, levels 0..J-1, j0 = 0.
// Coefficient (j, m) uses stream counter 2^j + m; the scaling coefficient uses
// counter 0.
TruthFunction random_ball_function(const wavelet::WaveletFamily& family, const wavelet::HolderBall& ball, int J,
                                   std::uint64_t seed);

// amp * 2^{-j(r+1/2)} psi_{j, m c0^{-1}}; throws ConfigError when the support
// leaves [0, 1].
TruthFunction spike_truth(const wavelet::WaveletFamily& family, int j, long m, double r, double amp = 1.0);

struct FixedDesignSample {
    std::size_t n = 0;
    double sigma = 0.0;
    std::vector<double> y;
    std::uint64_t seed = 0;
    std::uint64_t replicate = 0;
    std::string truth_id;
};

// y_i = f(i/n) + sigma z_i with z_i read from the normal stream keyed by seed
// at counter replicate * n + (i - 1).
FixedDesignSample simulate(const TruthFunction& f, std::size_t n, double sigma, std::uint64_t seed,
                           std::uint64_t replicate = 0);

// Same as simulate, with the truth already tabulated on the design grid.
FixedDesignSample simulate_values(std::span<const double> truth_values, double sigma, std::uint64_t seed,
                                  std::uint64_t replicate = 0, std::string truth_id = {});

// Adds sigma * noise in place (noise from the same counter convention).
void add_noise(std::span<double> y, double sigma, std::uint64_t seed, std::uint64_t replicate = 0);

}  // namespace acb
