#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "acb/executor.hpp"
#include "acb/lepski.hpp"
#include "acb/local_poly.hpp"
#include "acb/regression.hpp"
#include "acb/wavelet.hpp"

namespace acb {

enum class Regime { wide, narrow };
std::string_view regime_name(Regime r);

// Which member of distance_bounds feeds d_n. upper keeps the regime decision
// conservative; lower is available for comparison only.
enum class Surrogate { upper, lower };

struct BandParams {
    double r = 0.75;
    double s = 2.0;
    double B = 10.0;
    double alpha = 0.05;
    double L = 1.0;
    double kappa = 1.0;
    double lambda = 4.0;
    std::string family = "db3";
    int J = 0;  // dyadic level of the distance grid; 0 picks ceil(log2 n)
    Surrogate surrogate = Surrogate::upper;

    LocalPolyConfig config;
    double rho = 2.0;
    bool capped = true;
    double M_const = 0.0;  // Lepski constant; must be positive to build bands

    void validate() const;
    int level_for(std::size_t n) const;
};

struct ConfidenceBand {
    UniformGrid grid;
    std::vector<double> center;
    double halfwidth = 0.0;
    Regime regime = Regime::narrow;
    double d_n = 0.0;
    double tau = 0.0;
    double h_hat = 0.0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    BandParams params;

    double lower(std::size_t k) const { return center[k] - halfwidth; }
    double upper(std::size_t k) const { return center[k] + halfwidth; }
};

// Reusable per-n machinery: the Lepski selector and the undersmoothed
// estimator at h = (ln n / n)^{1/(2r+1)} evaluated on the dyadic grid.
class BandBuilder {
public:
    BandBuilder(std::size_t n, const BandParams& params);

    std::size_t n() const { return n_; }
    const BandParams& params() const { return params_; }
    const LepskiSelector& selector() const { return *selector_; }
    double undersmoothing_bandwidth() const { return h_r_; }
    double tau() const;

    // d_n from raw observations.
    double distance_statistic(std::span<const double> y) const;

    // Both distance bounds for a curve given on the dyadic grid of this builder.
    wavelet::DistanceBounds curve_distance(std::span<const double> dyadic_values) const;

    // Both distance bounds for a truth function sampled on the dyadic grid.
    wavelet::DistanceBounds truth_distance(const TruthFunction& f) const;

    ConfidenceBand build(const FixedDesignSample& sample) const;

    // Same parameters with different constants (L, kappa, lambda).
    ConfidenceBand build_with(const FixedDesignSample& sample, double L, double kappa) const;

    const UniformGrid& dyadic_grid() const { return dyadic_; }
    const LocalPolySmoother& undersmoother() const { return *under_; }

private:
    std::size_t n_;
    BandParams params_;
    double h_r_;
    UniformGrid dyadic_;
    wavelet::WaveletFamily family_;
    std::unique_ptr<LepskiSelector> selector_;
    std::unique_ptr<LocalPolySmoother> under_;
};

double distance_statistic(const FixedDesignSample& sample, const BandParams& params);
ConfidenceBand build_band(const FixedDesignSample& sample, const BandParams& params);

struct BandMetrics {
    bool covers = false;
    double diameter = 0.0;
};

BandMetrics band_metrics(const ConfidenceBand& band, const TruthFunction& truth);
// Truth already tabulated on the band grid.
BandMetrics band_metrics(const ConfidenceBand& band, std::span<const double> truth_values);

// Comment header lines "# key=value" (regime, d_n, tau, L, n, seed) followed
// by the columns x, center, lower, upper.
void write_band_csv(std::ostream& out, const ConfidenceBand& band);

struct CalibrationPanel {
    std::vector<TruthFunction> smooth;  // members of the s-ball
    std::vector<TruthFunction> far;     // r-ball truths far from the s-ball
};

// Default panel: zero plus two s-ball draws; two db3 spikes at level 4.
CalibrationPanel default_panel(const BandParams& params);

struct TruthCalibration {
    std::string id;
    bool far = false;
    double error_quantile = 0.0;  // (1 - alpha/2) quantile of ||f_hat - f|| / r_n(t_f)
    double kappa_bound = 0.0;     // tolerance bound of d_n / r_n(r) (smooth truths)
    double bias = 0.0;            // ||E f_n(h_r) - f|| / r_n(r)
    double distance_lower = 0.0;  // lower distance of f to the s-ball
    double distance_upper = 0.0;
    bool far_enough = true;       // distance_lower >= rho_n (far truths)
};

struct CalibrationReport {
    BandParams params;  // with L, kappa, lambda, M_const filled in
    double b_hat = 0.0;
    double rho_n = 0.0;
    std::size_t reps = 0;
    std::size_t n = 0;
    bool kappa_certified = true;  // false when reps are too few for the tolerance rule
    std::vector<TruthCalibration> truths;
};

// L: max over panel truths of the (1 - alpha/2) quantile of the scaled sup
// error. kappa: per smooth truth, the upper 95%-confidence tolerance bound for
// the (1 - alpha/4) quantile of d_n / r_n(r), maximized over the panel.
// lambda = 2 (kappa + b_hat). A nonpositive M_const in `base` is calibrated
// first. Throws ConfigError for reps < 200.
CalibrationReport calibrate_constants(const BandParams& base, const CalibrationPanel& panel, std::size_t n,
                                      double sigma, std::size_t reps, std::uint64_t seed,
                                      const ReplicateExecutor& executor = serial_executor());

}  // namespace acb
