#include <algorithm>
#include <cmath>
#include <map>

#include "acb/band.hpp"
#include "acb/concentration.hpp"
#include "acb/errors.hpp"
#include "acb/harness.hpp"
#include "acb/lepski.hpp"
#include "acb/lower_bound.hpp"
#include "acb/random.hpp"
#include "acb/stats.hpp"
#include "acb/text.hpp"

namespace acb::harness {

namespace {

using ull = unsigned long long;
using ll = long long;

std::string cell_id(std::string_view stage, const std::string& what, std::size_t n) {
    return std::string(stage) + "/" + what + "/n=" + std::to_string(n);
}

LocalPolyConfig poly_config(const ExperimentConfig& c) {
    LocalPolyConfig lp;
    lp.l = c.l;
    lp.kernel = parse_kernel(c.kernel);
    return lp;
}

BandParams band_params(const ExperimentConfig& c) {
    BandParams p;
    p.r = c.r;
    p.s = c.s;
    p.B = c.B;
    p.alpha = c.alpha;
    p.family = c.family;
    p.J = c.J;
    p.surrogate = c.surrogate == "lower" ? Surrogate::lower : Surrogate::upper;
    p.config = poly_config(c);
    p.rho = c.rho;
    p.capped = c.capped;
    p.M_const = c.M;
    return p;
}

CalibrationPanel panel_for(const ExperimentConfig& c) {
    auto panel = default_panel(band_params(c));
    if (!c.smooth.empty()) panel.smooth = parse_truth_list(c.smooth);
    if (!c.far.empty()) panel.far = parse_truth_list(c.far);
    return panel;
}

bool constants_given(const ExperimentConfig& c) { return c.L > 0.0 && c.kappa > 0.0 && c.lambda > 0.0 && c.M > 0.0; }

// Calibrated (or configured) band constants at n, plus the calibration report
// when one was run.
struct BandSetup {
    BandParams params;
    std::optional<CalibrationReport> report;
};

BandSetup band_setup(const ExperimentConfig& c, std::size_t n, const ReplicateExecutor& executor) {
    BandSetup setup;
    setup.params = band_params(c);
    if (constants_given(c)) {
        setup.params.L = c.L;
        setup.params.kappa = c.kappa;
        setup.params.lambda = c.lambda;
        return setup;
    }
    setup.report = calibrate_constants(setup.params, panel_for(c), n, c.sigma, c.calib_reps, c.seed, executor);
    setup.params = setup.report->params;
    return setup;
}

nlohmann::json band_constants_json(std::size_t n, const BandSetup& s) {
    nlohmann::json j;
    j["n"] = n;
    j["L"] = s.params.L;
    j["kappa"] = s.params.kappa;
    j["lambda"] = s.params.lambda;
    j["M_const"] = s.params.M_const;
    j["source"] = s.report ? "calibrated" : "configured";
    if (s.report) {
        j["b_hat"] = s.report->b_hat;
        j["rho_n"] = s.report->rho_n;
        j["calibration_reps"] = s.report->reps;
        j["kappa_certified"] = s.report->kappa_certified;
    }
    return j;
}

Cell opt(const std::optional<double>& v) { return v ? Cell{*v} : Cell{}; }

}  // namespace

Report run_coverage(const ExperimentConfig& c, const ReplicateExecutor& executor) {
    Report report;
    report.rows.columns = {"truth",        "class",         "n",           "reps",        "coverage",
                           "coverage_se",  "mean_diameter", "diameter_se", "max_diameter", "wide_freq",
                           "wide_se",      "narrow_freq",   "narrow_se",   "diameter_narrow", "diameter_wide",
                           "L",            "kappa",         "lambda",      "M_const",     "rho_n",
                           "far_enough",   "alpha",         "seed"};
    const auto panel = panel_for(c);
    struct Entry {
        const TruthFunction* truth;
        const char* cls;
    };
    std::vector<Entry> entries;
    for (const auto& f : panel.smooth) entries.push_back({&f, "smooth"});
    for (const auto& f : panel.far) entries.push_back({&f, "far"});

    for (const std::size_t n : c.n) {
        auto setup = band_setup(c, n, executor);
        if (!(setup.params.M_const > 0.0)) {
            const LepskiSelector sel(n, build_grid(n, c.rho, c.l, c.capped), poly_config(c));
            setup.params.M_const =
                calibrate_M(sel, c.sigma, c.M_reps, rng::derive_seed(c.seed, cell_id("coverage-M", "zero", n), 0), 0.95,
                            executor);
        }
        const BandBuilder builder(n, setup.params);
        const double rho_n = setup.params.lambda * rate(c.r, n);
        report.constants.push_back(band_constants_json(n, setup));

        for (const auto& [truth, cls] : entries) {
            const auto values = truth->on_design(n);
            const auto id = cell_id("coverage", truth->id, n);
            std::vector<unsigned char> covers(c.reps, 0);
            std::vector<unsigned char> wide(c.reps, 0);
            std::vector<double> diameter(c.reps, 0.0);
            executor(c.reps, [&](std::size_t rep) {
                const auto sample = simulate_values(values, c.sigma, rng::derive_seed(c.seed, id, rep), 0, truth->id);
                const auto band = builder.build(sample);
                const auto m = band_metrics(band, values);
                covers[rep] = m.covers;
                wide[rep] = band.regime == Regime::wide;
                diameter[rep] = m.diameter;
            });
            const double R = static_cast<double>(c.reps);
            const double cov = static_cast<double>(std::count(covers.begin(), covers.end(), 1)) / R;
            const double wf = static_cast<double>(std::count(wide.begin(), wide.end(), 1)) / R;
            const auto d = stats::mean_se(diameter);
            const double far_distance = builder.truth_distance(*truth).lower;
            const bool far_enough = std::string_view(cls) == "smooth" || far_distance >= rho_n;
            report.rows.add({truth->id, std::string(cls), ull{n}, ull{c.reps}, cov, stats::binomial_se(cov, c.reps),
                             d.mean, d.se, *std::max_element(diameter.begin(), diameter.end()), wf,
                             stats::binomial_se(wf, c.reps), 1.0 - wf, stats::binomial_se(1.0 - wf, c.reps),
                             2.0 * setup.params.L * rate(c.s, n), 2.0 * setup.params.L * rate(c.r, n),
                             setup.params.L, setup.params.kappa, setup.params.lambda, setup.params.M_const, rho_n,
                             far_enough, c.alpha, ull{c.seed}});
        }
    }
    return report;
}

Report run_rates(const ExperimentConfig& c, const ReplicateExecutor& executor) {
    if (c.n.size() < 4) throw ConfigError("rates need at least 4 sample sizes");
    const auto [lo, hi] = std::minmax_element(c.n.begin(), c.n.end());
    if (static_cast<double>(*hi) < 4.0 * static_cast<double>(*lo)) {
        throw ConfigError("rates need sample sizes spanning at least 2 octaves");
    }
    const auto truths = parse_truth_list(c.truths);
    if (truths.empty()) throw ConfigError("rates need at least one truth");

    Report report;
    report.rows.columns = {"truth", "t", "n", "reps", "risk", "risk_se", "mean_h", "rate", "risk_over_rate", "M_const",
                           "seed"};
    std::vector<std::vector<double>> risk(truths.size());
    auto ns = c.n;
    std::sort(ns.begin(), ns.end());
    for (const std::size_t n : ns) {
        const LepskiSelector sel(n, build_grid(n, c.rho, c.l, c.capped), poly_config(c));
        const double M = c.M > 0.0 ? c.M
                                   : calibrate_M(sel, c.sigma, c.M_reps,
                                                 rng::derive_seed(c.seed, cell_id("rates-M", "zero", n), 0), 0.95,
                                                 executor);
        report.constants.push_back({{"n", n}, {"M_const", M}, {"source", c.M > 0.0 ? "configured" : "calibrated"}});
        for (std::size_t t = 0; t < truths.size(); ++t) {
            const auto& f = truths[t];
            const auto values = f.on_design(n);
            const auto id = cell_id("rates", f.id, n);
            std::vector<double> err(c.reps, 0.0);
            std::vector<double> hs(c.reps, 0.0);
            executor(c.reps, [&](std::size_t rep) {
                const auto sample = simulate_values(values, c.sigma, rng::derive_seed(c.seed, id, rep), 0, f.id);
                const auto r = sel.select(sample.y, M);
                double e = 0.0;
                for (std::size_t i = 0; i < n; ++i) e = std::max(e, std::abs(r.estimate.values[i] - values[i]));
                err[rep] = e;
                hs[rep] = r.h_hat;
            });
            const auto m = stats::mean_se(err);
            const auto mh = stats::mean_se(hs);
            risk[t].push_back(m.mean);
            Cell rn{};
            Cell ratio{};
            if (f.t) {
                rn = rate(*f.t, n);
                ratio = m.mean / rate(*f.t, n);
            }
            report.rows.add({f.id, opt(f.t), ull{n}, ull{c.reps}, m.mean, m.se, mh.mean, rn, ratio, M, ull{c.seed}});
        }
    }
    // Rows ordered by (truth, n).
    std::stable_sort(report.rows.rows.begin(), report.rows.rows.end(),
                     [&](const auto& a, const auto& b) {
                         return std::get<std::string>(a[0]) < std::get<std::string>(b[0]);
                     });

    Table slopes;
    slopes.columns = {"kind", "truth", "t", "slope", "slope_se", "ci_low", "ci_high", "target", "points"};
    std::vector<double> xs(ns.begin(), ns.end());
    const auto add_fit = [&](const std::string& kind, const std::string& name, std::optional<double> t,
                             const std::vector<double>& ys) {
        const auto fit = stats::loglog_fit(xs, ys);
        slopes.add({kind, name, opt(t), fit.slope, fit.slope_se, fit.ci_low, fit.ci_high,
                    t ? Cell{-*t / (2.0 * *t + 1.0)} : Cell{}, ull{fit.points}});
    };
    for (std::size_t t = 0; t < truths.size(); ++t) add_fit("truth", truths[t].id, truths[t].t, risk[t]);
    // Worst case over all truths with the same declared t: the empirical
    // counterpart of the supremum over the smoothness class.
    std::map<double, std::vector<double>> worst;
    for (std::size_t t = 0; t < truths.size(); ++t) {
        if (!truths[t].t) continue;
        auto& w = worst[*truths[t].t];
        w.resize(ns.size(), 0.0);
        for (std::size_t k = 0; k < ns.size(); ++k) w[k] = std::max(w[k], risk[t][k]);
    }
    for (const auto& [t, ys] : worst) add_fit("worst", "t=" + text::format_double(t), t, ys);
    report.slopes = std::move(slopes);
    return report;
}

Report run_lowerbound(const ExperimentConfig& c, const ReplicateExecutor& executor) {
    Report report;
    report.rows.columns = {"n",    "r",     "j",     "delta_from_jstar", "eta",          "type1",
                           "worst_type2", "risk", "se", "test",      "jstar",        "alternatives",
                           "worst_member", "reps", "family", "seed",  "status"};
    auto ns = c.n;
    std::sort(ns.begin(), ns.end());
    auto deltas = c.deltas;
    std::sort(deltas.begin(), deltas.end());
    auto etas = c.eta;
    std::sort(etas.begin(), etas.end());
    for (const std::size_t n : ns) {
        const int js = jstar(n, c.r);
        report.constants.push_back({{"n", n}, {"jstar", js}});
        for (const bool reject : {false, true}) {
            const auto b = constant_test_risk(reject);
            report.rows.add({ull{n}, c.r, ll{js}, ll{0}, Cell{}, b.type1, b.worst_type2, b.risk, 0.0, b.test_id, ll{js},
                             Cell{}, Cell{}, ull{0}, c.test_family, Cell{}, std::string("ok")});
        }

        std::optional<BandBuilder> builder;
        if (c.band_test) {
            auto setup = band_setup(c, n, executor);
            if (!(setup.params.M_const > 0.0)) throw ConfigError("band test needs a positive M");
            report.constants.push_back(band_constants_json(n, setup));
            builder.emplace(n, setup.params);
        }

        for (const long delta : deltas) {
            const long j = js + delta;
            const std::string what = c.test_family + "/j=" + std::to_string(j);
            const std::uint64_t stream = rng::derive_seed(c.seed, cell_id("lowerbound", what, n), 0);
            TestingProblem problem{c.test_family, static_cast<int>(j), c.r, n, c.sigma, 1.0};
            const auto skipped = [&](const std::string& test, Cell eta, const std::string& why) {
                report.rows.add({ull{n}, c.r, ll{j}, ll{delta}, eta, Cell{}, Cell{}, Cell{}, Cell{}, test, ll{js},
                                 ull{0}, Cell{}, ull{c.reps}, c.test_family, ull{stream}, why});
            };
            std::string why;
            if (j < 0) {
                why = "negative level";
            } else if (!(c.sigma > 0.0)) {
                why = "sigma must be positive";
            } else {
                try {
                    problem.spikes();
                } catch (const ConfigError& e) {
                    why = e.what();
                }
            }
            for (const double eta : etas) {
                if (!why.empty()) {
                    skipped("lr", eta, why);
                    continue;
                }
                const auto r = lr_test_risk(problem, eta, c.reps, stream, executor);
                report.rows.add({ull{n}, c.r, ll{j}, ll{delta}, eta, r.type1, r.worst_type2, r.risk, r.se, r.test_id,
                                 ll{js}, ull{r.alternatives}, ull{r.worst_member}, ull{r.replicates}, c.test_family,
                                 ull{stream}, std::string("ok")});
            }
            if (builder) {
                if (!why.empty()) {
                    skipped("band", Cell{}, why);
                    continue;
                }
                const auto r = band_test_risk(problem, *builder, c.band_reps, c.max_alternatives, stream, executor);
                report.rows.add({ull{n}, c.r, ll{j}, ll{delta}, Cell{}, r.type1, r.worst_type2, r.risk, r.se,
                                 r.test_id, ll{js}, ull{r.alternatives}, ull{r.worst_member}, ull{r.replicates},
                                 c.test_family, ull{stream}, std::string("ok")});
            }
        }
    }
    return report;
}

Report run_concentration(const ExperimentConfig& c, const ReplicateExecutor& executor) {
    Report report;
    report.rows.columns = {"u",  "empirical", "se",   "bound",     "n",         "h",          "sigma",       "c1",
                           "c2", "reps",      "seed", "in_range", "dominated", "sigma0_sq", "max_variance", "truth"};
    const auto truths = parse_truth_list(c.truths.empty() ? "zero" : c.truths);
    if (truths.size() != 1) throw ConfigError("concentration takes exactly one truth");
    const auto& f = truths.front();
    const auto lp = poly_config(c);
    auto ns = c.n;
    std::sort(ns.begin(), ns.end());
    auto hs = c.h;
    std::sort(hs.begin(), hs.end());
    for (const std::size_t n : ns) {
        for (const double h : hs) {
            const std::string what = "h=" + text::format_double(h);
            const auto pilot = rng::derive_seed(c.seed, cell_id("concentration-pilot", what, n), 0);
            const auto constants = tail_constants(n, h, lp, c.sigma, c.pilot_reps, pilot, executor);
            std::vector<double> u = c.u;
            if (u.empty()) {
                // Without noise c2 vanishes; sweep on the unit-noise scale instead.
                const double c2 = c.sigma > 0.0 ? constants.c2
                                                : fit_variance_constant(n, h, lp, 1.0, c.pilot_reps, pilot, executor);
                u = default_sweep(n, h, c2);
            }
            std::sort(u.begin(), u.end());
            const auto stream = rng::derive_seed(c.seed, cell_id("concentration", what, n), 0);
            report.constants.push_back({{"n", n}, {"h", h}, {"c1", constants.c1}, {"c2", constants.c2},
                                        {"pilot_reps", c.pilot_reps}, {"pilot_seed", pilot}});
            for (const auto& t : empirical_tail(f, n, h, lp, c.sigma, u, constants, c.reps, stream, executor)) {
                report.rows.add({t.u, t.empirical, t.se, t.bound, ull{t.n}, t.h, t.sigma, t.c1, t.c2, ull{t.reps},
                                 ull{t.seed}, t.in_range, t.dominated(), t.sigma0_sq, t.max_variance, f.id});
            }
        }
    }
    return report;
}

Report run_calibrate(const ExperimentConfig& c, const ReplicateExecutor& executor) {
    Report report;
    report.rows.columns = {"n",       "truth",  "class",  "error_quantile", "kappa_bound", "bias",
                           "distance_lower", "distance_upper", "far_enough", "L", "kappa", "lambda",
                           "M_const", "b_hat", "rho_n", "kappa_certified", "reps", "seed"};
    auto ns = c.n;
    std::sort(ns.begin(), ns.end());
    const auto panel = panel_for(c);
    auto base = band_params(c);
    for (const std::size_t n : ns) {
        const auto cal = calibrate_constants(base, panel, n, c.sigma, c.reps, c.seed, executor);
        const auto& p = cal.params;
        BandSetup setup{p, cal};
        report.constants.push_back(band_constants_json(n, setup));
        for (const auto& t : cal.truths) {
            report.rows.add({ull{n}, t.id, std::string(t.far ? "far" : "smooth"), t.error_quantile,
                             t.far ? Cell{} : Cell{t.kappa_bound}, t.bias, t.distance_lower, t.distance_upper,
                             t.far_enough, p.L, p.kappa, p.lambda, p.M_const, cal.b_hat, cal.rho_n,
                             cal.kappa_certified, ull{cal.reps}, ull{c.seed}});
        }
    }
    return report;
}

Report run_experiment(const ExperimentConfig& c, const ReplicateExecutor& executor) {
    if (c.experiment == "coverage") return run_coverage(c, executor);
    if (c.experiment == "rates") return run_rates(c, executor);
    if (c.experiment == "lowerbound") return run_lowerbound(c, executor);
    if (c.experiment == "concentration") return run_concentration(c, executor);
    if (c.experiment == "calibrate") return run_calibrate(c, executor);
    throw ConfigError("unknown experiment '" + c.experiment + "'");
}

}  // namespace acb::harness
