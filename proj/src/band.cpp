#include "acb/band.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "acb/errors.hpp"
#include "acb/random.hpp"
#include "acb/stats.hpp"
#include "acb/text.hpp"

namespace acb {

namespace {

double sup_abs_diff(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

std::string experiment_id(std::string_view stage, std::string_view truth, std::size_t n) {
    return std::string(stage) + "/" + std::string(truth) + "/n=" + std::to_string(n);
}

}  // namespace

std::string_view regime_name(Regime r) { return r == Regime::wide ? "wide" : "narrow"; }

void BandParams::validate() const {
    if (!(r > 0.0 && r < s)) throw ConfigError("band exponents need 0 < r < s");
    if (!(B > 0.0)) throw ConfigError("ball radius B must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (!(L > 0.0 && kappa > 0.0 && lambda > 0.0)) throw ConfigError("L, kappa and lambda must be positive");
    if (J < 0 || J > 20) throw ConfigError("distance grid level J must lie in [0, 20]");
    config.validate();
    if (!(rho > 1.0)) throw ConfigError("bandwidth ratio rho must exceed 1");
}

int BandParams::level_for(std::size_t n) const {
    if (J > 0) return J;
    int j = 1;
    while ((std::size_t{1} << j) < n) ++j;
    return j;
}

BandBuilder::BandBuilder(std::size_t n, const BandParams& params)
    : n_(n),
      params_(params),
      h_r_(std::pow(std::log(static_cast<double>(n)) / static_cast<double>(n), 1.0 / (2.0 * params.r + 1.0))),
      dyadic_(UniformGrid::dyadic(params.level_for(n))),
      family_(wavelet::build_family(params.family)) {
    params_.validate();
    if (n < 8) throw ConfigError("bands need n >= 8");
    if (!(params_.M_const > 0.0)) throw ConfigError("Lepski constant M must be positive to build bands");
    selector_ = std::make_unique<LepskiSelector>(n, build_grid(n, params_.rho, params_.config.l, params_.capped),
                                                 params_.config);
    under_ = std::make_unique<LocalPolySmoother>(n, h_r_, params_.config, dyadic_);
}

double BandBuilder::tau() const { return params_.kappa * rate(params_.r, n_); }

wavelet::DistanceBounds BandBuilder::curve_distance(std::span<const double> dyadic_values) const {
    const auto coeffs = wavelet::analyze(dyadic_values, family_, 0);
    return wavelet::distance_bounds(coeffs, wavelet::HolderBall(params_.s, params_.B), family_);
}

wavelet::DistanceBounds BandBuilder::truth_distance(const TruthFunction& f) const {
    return curve_distance(f.on_lattice(dyadic_.denom, dyadic_.first, dyadic_.count));
}

double BandBuilder::distance_statistic(std::span<const double> y) const {
    const auto d = curve_distance(under_->apply(y));
    return params_.surrogate == Surrogate::upper ? d.upper : d.lower;
}

ConfidenceBand BandBuilder::build_with(const FixedDesignSample& sample, double L, double kappa) const {
    if (sample.n != n_) throw ShapeError("sample size does not match the band builder");
    ConfidenceBand band;
    band.params = params_;
    band.params.L = L;
    band.params.kappa = kappa;
    band.n = n_;
    band.seed = sample.seed;
    band.grid = UniformGrid::design(n_);
    auto sel = selector_->select(sample.y, params_.M_const);
    band.center = std::move(sel.estimate.values);
    band.h_hat = sel.h_hat;
    band.d_n = distance_statistic(sample.y);
    band.tau = kappa * rate(params_.r, n_);
    band.regime = band.d_n > band.tau ? Regime::wide : Regime::narrow;
    band.halfwidth = L * rate(band.regime == Regime::wide ? params_.r : params_.s, n_);
    return band;
}

ConfidenceBand BandBuilder::build(const FixedDesignSample& sample) const {
    return build_with(sample, params_.L, params_.kappa);
}

double distance_statistic(const FixedDesignSample& sample, const BandParams& params) {
    auto p = params;
    if (!(p.M_const > 0.0)) p.M_const = 1.0;  // the selector plays no role in d_n
    return BandBuilder(sample.n, p).distance_statistic(sample.y);
}

ConfidenceBand build_band(const FixedDesignSample& sample, const BandParams& params) {
    return BandBuilder(sample.n, params).build(sample);
}

BandMetrics band_metrics(const ConfidenceBand& band, std::span<const double> truth_values) {
    if (truth_values.size() != band.center.size()) throw ShapeError("truth values do not match the band grid");
    BandMetrics m;
    m.covers = true;
    for (std::size_t k = 0; k < truth_values.size() && m.covers; ++k) {
        m.covers = band.lower(k) <= truth_values[k] && truth_values[k] <= band.upper(k);
    }
    m.diameter = 2.0 * band.halfwidth;
    return m;
}

BandMetrics band_metrics(const ConfidenceBand& band, const TruthFunction& truth) {
    return band_metrics(band, truth.on_lattice(band.grid.denom, band.grid.first, band.grid.count));
}

void write_band_csv(std::ostream& out, const ConfidenceBand& band) {
    using text::format_double;
    out << "# regime=" << regime_name(band.regime) << '\n'
        << "# d_n=" << format_double(band.d_n) << '\n'
        << "# tau=" << format_double(band.tau) << '\n'
        << "# L=" << format_double(band.params.L) << '\n'
        << "# n=" << band.n << '\n'
        << "# seed=" << band.seed << '\n'
        << "x,center,lower,upper\n";
    for (std::size_t k = 0; k < band.center.size(); ++k) {
        out << format_double(band.grid.at(k)) << ',' << format_double(band.center[k]) << ','
            << format_double(band.lower(k)) << ',' << format_double(band.upper(k)) << '\n';
    }
}

CalibrationPanel default_panel(const BandParams& params) {
    CalibrationPanel panel;
    const std::string ball = "ball:t=" + text::format_double(params.s) + ",B=" + text::format_double(params.B);
    panel.smooth = parse_truth_list("zero;" + ball + ",seed=1;" + ball + ",seed=2");
    const std::string spike = "spike:j=4,r=" + text::format_double(params.r) + ",amp=" + text::format_double(params.B) +
                              ",family=db3";
    panel.far = {parse_truth(spike + ",m=1"), parse_truth(spike + ",m=2")};
    return panel;
}

CalibrationReport calibrate_constants(const BandParams& base, const CalibrationPanel& panel, std::size_t n,
                                      double sigma, std::size_t reps, std::uint64_t seed,
                                      const ReplicateExecutor& executor) {
    if (reps < 200) throw ConfigError("constant calibration needs at least 200 replicates");
    if (panel.smooth.empty() || panel.far.empty()) throw ConfigError("calibration panel needs smooth and far truths");
    base.validate();

    CalibrationReport report;
    report.params = base;
    report.reps = reps;
    report.n = n;
    if (!(report.params.M_const > 0.0)) {
        const LepskiSelector sel(n, build_grid(n, base.rho, base.config.l, base.capped), base.config);
        report.params.M_const =
            calibrate_M(sel, sigma, 500, rng::derive_seed(seed, experiment_id("calibrate-M", "zero", n), 0), 0.95,
                        executor);
    }
    const BandBuilder builder(n, report.params);
    const double rn_r = rate(base.r, n);
    const double rn_s = rate(base.s, n);

    struct Entry {
        const TruthFunction* truth;
        bool far;
    };
    std::vector<Entry> entries;
    for (const auto& f : panel.smooth) entries.push_back({&f, false});
    for (const auto& f : panel.far) entries.push_back({&f, true});

    // Bias of the undersmoothed estimator, measured on the design grid.
    const LocalPolySmoother under_design(n, builder.undersmoothing_bandwidth(), base.config, UniformGrid::design(n));

    double L = 0.0;
    double kappa = 0.0;
    double b_hat = 0.0;
    for (const auto& [truth, far] : entries) {
        const auto values = truth->on_design(n);
        const double rn_t = far ? rn_r : rn_s;
        std::vector<double> err(reps);
        std::vector<double> dist(reps);
        const auto id = experiment_id("calibrate", truth->id, n);
        executor(reps, [&](std::size_t rep) {
            const auto sample = simulate_values(values, sigma, rng::derive_seed(seed, id, rep), 0, truth->id);
            const auto sel = builder.selector().select(sample.y, report.params.M_const);
            err[rep] = sup_abs_diff(sel.estimate.values, values) / rn_t;
            dist[rep] = builder.distance_statistic(sample.y) / rn_r;
        });

        TruthCalibration tc;
        tc.id = truth->id;
        tc.far = far;
        tc.error_quantile = stats::order_quantile(err, 1.0 - base.alpha / 2.0);
        L = std::max(L, tc.error_quantile);

        if (!far) {
            const auto rank = stats::upper_tolerance_rank(reps, base.alpha / 4.0, 0.95);
            auto sorted = dist;
            std::sort(sorted.begin(), sorted.end());
            if (!rank) report.kappa_certified = false;
            tc.kappa_bound = sorted[(rank ? *rank : reps) - 1];
            kappa = std::max(kappa, tc.kappa_bound);
        }

        tc.bias = sup_abs_diff(under_design.apply(values), values) / rn_r;
        b_hat = std::max(b_hat, tc.bias);

        const auto d = builder.truth_distance(*truth);
        tc.distance_lower = d.lower;
        tc.distance_upper = d.upper;
        report.truths.push_back(tc);
    }

    // kappa must stay positive even if every smooth replicate had d_n = 0.
    kappa = std::max(kappa, 1e-6);
    report.params.L = L;
    report.params.kappa = kappa;
    report.params.lambda = 2.0 * (kappa + b_hat);
    report.b_hat = b_hat;
    report.rho_n = report.params.lambda * rn_r;
    for (auto& tc : report.truths) tc.far_enough = !tc.far || tc.distance_lower >= report.rho_n;
    return report;
}

}  // namespace acb
