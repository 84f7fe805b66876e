#include "acb/lepski.hpp"

#include <algorithm>
#include <cmath>

#include "acb/errors.hpp"

namespace acb {

namespace {

double sup_diff(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

std::vector<std::vector<double>> pairwise_table(const std::vector<std::vector<double>>& est) {
    const std::size_t K = est.size();
    std::vector<std::vector<double>> table(K, std::vector<double>(K, 0.0));
    for (std::size_t a = 0; a < K; ++a) {
        for (std::size_t b = a + 1; b < K; ++b) table[a][b] = sup_diff(est[a], est[b]);
    }
    return table;
}

}  // namespace

BandwidthGrid build_grid(std::size_t n, double rho, int l, bool capped) {
    if (n < 8) throw ConfigError("bandwidth grid needs n >= 8");
    if (!(rho > 1.0)) throw ConfigError("bandwidth ratio rho must exceed 1");
    if (l < 0) throw ConfigError("polynomial order must be nonnegative");
    const double nd = static_cast<double>(n);
    const double ln = std::log(nd);
    BandwidthGrid g;
    g.rho = rho;
    g.capped = capped;
    g.floor = ln * ln / nd;
    g.cap = std::pow(ln / nd, 1.0 / (2.0 * l + 1.0));
    for (int k = 0;; ++k) {
        const double h = std::pow(rho, -static_cast<double>(k));
        if (!(h > g.floor)) break;
        if (!capped || h <= g.cap) g.values.push_back(h);
    }
    if (g.values.empty()) throw ConfigError("bandwidth grid is empty for n=" + std::to_string(n));
    return g;
}

double lepski_threshold(double M, std::size_t n, double g) {
    const double nd = static_cast<double>(n);
    return std::sqrt(M * std::log(nd) / (nd * g));
}

double formula_M(double sigma, double c1, double c2, double K) {
    const double root = std::sqrt(2.0 * sigma * c1 * K) + c2;
    return 16.0 * root * root;
}

LepskiSelector::LepskiSelector(std::size_t n, BandwidthGrid grid, LocalPolyConfig config)
    : n_(n), grid_(std::move(grid)), config_(config) {
    const auto design = UniformGrid::design(n);
    for (const double h : grid_.values) smoothers_.push_back(std::make_unique<LocalPolySmoother>(n, h, config_, design));
}

std::vector<std::vector<double>> LepskiSelector::estimates(std::span<const double> y) const {
    std::vector<std::vector<double>> out;
    out.reserve(smoothers_.size());
    for (const auto& s : smoothers_) out.push_back(s->apply(y));
    return out;
}

std::size_t select_index(const std::vector<std::vector<double>>& pairwise, std::span<const double> h, double M_const,
                         std::size_t n) {
    if (!(M_const > 0.0)) throw ConfigError("Lepski constant M must be positive");
    const std::size_t K = h.size();
    for (std::size_t a = 0; a < K; ++a) {
        bool ok = true;
        for (std::size_t b = a + 1; b < K && ok; ++b) ok = pairwise[a][b] <= lepski_threshold(M_const, n, h[b]);
        if (ok) return a;
    }
    return K - 1;
}

LepskiResult LepskiSelector::select(std::span<const double> y, double M_const) const {
    auto est = estimates(y);
    LepskiResult r;
    r.M_const = M_const;
    r.pairwise = pairwise_table(est);
    r.index = select_index(r.pairwise, grid_.values, M_const, n_);
    r.h_hat = grid_.values[r.index];
    r.estimate = {UniformGrid::design(n_), std::move(est[r.index]), r.h_hat, CurveEstimate::Provenance::adaptive};
    return r;
}

double LepskiSelector::minimal_M_for_max(std::span<const double> y) const {
    const auto est = estimates(y);
    const double nd = static_cast<double>(n_);
    double M = 0.0;
    for (std::size_t b = 1; b < est.size(); ++b) {
        const double d = sup_diff(est[0], est[b]);
        M = std::max(M, d * d * nd * grid_.values[b] / std::log(nd));
    }
    return M;
}

LepskiResult select_bandwidth(const FixedDesignSample& sample, const BandwidthGrid& grid, const LocalPolyConfig& config,
                              double M_const) {
    if (grid.values.empty()) throw ConfigError("bandwidth grid is empty");
    return LepskiSelector(sample.n, grid, config).select(sample.y, M_const);
}

double calibrate_M(const LepskiSelector& selector, double sigma, std::size_t reps, std::uint64_t seed, double coverage,
                   const ReplicateExecutor& executor) {
    if (reps == 0) throw ConfigError("M calibration needs at least one replicate");
    if (!(coverage > 0.0 && coverage <= 1.0)) throw ConfigError("calibration coverage must lie in (0, 1]");
    std::vector<double> minimal(reps, 0.0);
    executor(reps, [&](std::size_t rep) {
        std::vector<double> y(selector.n(), 0.0);
        add_noise(y, sigma, seed, rep);
        minimal[rep] = selector.minimal_M_for_max(y);
    });
    std::sort(minimal.begin(), minimal.end());
    const auto k = static_cast<std::size_t>(std::ceil(coverage * static_cast<double>(reps)));
    const double M = minimal[std::min(reps, std::max<std::size_t>(k, 1)) - 1];
    // A single-bandwidth grid or noiseless calibration leaves M at zero;
    // any positive value then gives the same selections.
    return M > 0.0 ? M : 1e-12;
}

CurveEstimate adaptive_estimate(const FixedDesignSample& sample, const AdaptiveParams& params) {
    const auto grid = build_grid(sample.n, params.rho, params.config.l, params.capped);
    return select_bandwidth(sample, grid, params.config, params.M_const).estimate;
}

double oracle_bandwidth(const TruthFunction& f, const LepskiSelector& selector, double M_const) {
    const auto truth = f.on_design(selector.n());
    const double nd = static_cast<double>(selector.n());
    const auto& h = selector.grid().values;
    for (std::size_t k = 0; k < h.size(); ++k) {
        const double bias = sup_diff(selector.smoother(k).apply(truth), truth);
        if (bias <= std::sqrt(M_const) / 4.0 * std::sqrt(std::log(nd) / (nd * h[k]))) return h[k];
    }
    return h.back();
}

}  // namespace acb
