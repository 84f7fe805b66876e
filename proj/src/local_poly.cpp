#include "acb/local_poly.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numeric>

#include <fftw3.h>
#include <Eigen/Dense>

#include "acb/errors.hpp"
#include "acb/random.hpp"

namespace acb {

namespace {

// FFTW's planner is not reentrant; execution through the new-array interface is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

double factorial(int p) {
    double f = 1.0;
    for (int k = 2; k <= p; ++k) f *= k;
    return f;
}

std::size_t next_fast_size(std::size_t want) {
    std::size_t best = std::size_t{1} << 62;
    for (std::size_t p2 = 1; p2 < best; p2 *= 2) {
        for (std::size_t p3 = p2; p3 < best; p3 *= 3) {
            for (std::size_t p5 = p3; p5 < best; p5 *= 5) {
                if (p5 >= want) {
                    best = std::min(best, p5);
                    break;
                }
            }
            if (p3 >= want) break;
        }
        if (p2 >= want) break;
    }
    return best;
}

void check_inputs(std::size_t n, double h, const LocalPolyConfig& config) {
    config.validate();
    if (n < 2) throw DomainError("local polynomial estimator needs n >= 2");
    if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("bandwidth must be positive and finite");
}

// Solves B a = e0 for the (l+1)x(l+1) local design matrix. The ridge is
// applied only when the plain system is numerically singular, so exact
// polynomial reproduction is untouched for well-posed windows.
Eigen::VectorXd solve_local(const Eigen::MatrixXd& B, double ridge_eps) {
    const auto dim = B.rows();
    Eigen::VectorXd e0 = Eigen::VectorXd::Zero(dim);
    e0(0) = 1.0;
    Eigen::LLT<Eigen::MatrixXd> llt(B);
    if (llt.info() == Eigen::Success && llt.rcond() > 1e-13) return llt.solve(e0);
    if (ridge_eps > 0.0) {
        const double scale = std::max(B.diagonal().maxCoeff(), 1e-300);
        llt.compute(B + ridge_eps * scale * Eigen::MatrixXd::Identity(dim, dim));
        if (llt.info() == Eigen::Success && llt.rcond() > 1e-15) return llt.solve(e0);
    }
    throw BandwidthTooSmall("local design matrix is singular; increase the bandwidth");
}

}  // namespace

Kernel parse_kernel(std::string_view name) {
    if (name == "epanechnikov") return Kernel::epanechnikov;
    if (name == "rectangular") return Kernel::rectangular;
    throw ConfigError("unknown kernel '" + std::string(name) + "' (expected epanechnikov or rectangular)");
}

std::string_view kernel_name(Kernel k) { return k == Kernel::epanechnikov ? "epanechnikov" : "rectangular"; }

double kernel_value(Kernel k, double u) {
    if (std::abs(u) > 1.0) return 0.0;
    return k == Kernel::rectangular ? 0.5 : 0.75 * (1.0 - u * u);
}

void LocalPolyConfig::validate() const {
    if (l < 0 || l > 6) throw ConfigError("polynomial order l must lie in [0, 6]");
    if (!(ridge_eps >= 0.0 && ridge_eps <= 1e-6)) throw ConfigError("ridge_eps must lie in [0, 1e-6]");
}

std::vector<double> UniformGrid::points() const {
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) out[k] = at(k);
    return out;
}

WeightRow weight_row(std::size_t n, double h, const LocalPolyConfig& config, double x) {
    check_inputs(n, h, config);
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("evaluation point must lie in [0, 1]");
    const double nd = static_cast<double>(n);
    const double nh = nd * h;
    const auto lo = static_cast<long>(std::max(1.0, std::ceil(nd * (x - h) - 1e-9)));
    const auto hi = static_cast<long>(std::min(nd, std::floor(nd * (x + h) + 1e-9)));

    const int dim = config.l + 1;
    WeightRow row;
    row.first = static_cast<std::size_t>(std::max(lo, 1L));
    if (hi < lo) throw BandwidthTooSmall("no design point inside the smoothing window");

    std::vector<double> u(static_cast<std::size_t>(hi - lo + 1));
    std::vector<double> k(u.size());
    int positive = 0;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd U(dim);
    for (long i = lo; i <= hi; ++i) {
        const auto idx = static_cast<std::size_t>(i - lo);
        u[idx] = std::clamp((static_cast<double>(i) / nd - x) / h, -1.0, 1.0);
        k[idx] = kernel_value(config.kernel, u[idx]);
        if (k[idx] <= 0.0) continue;
        ++positive;
        for (int p = 0; p < dim; ++p) U(p) = std::pow(u[idx], p) / factorial(p);
        B.noalias() += k[idx] * U * U.transpose();
    }
    if (positive < dim) throw BandwidthTooSmall("fewer than l + 1 design points inside the smoothing window");
    B /= nh;
    const Eigen::VectorXd a = solve_local(B, config.ridge_eps);

    row.values.resize(u.size());
    for (std::size_t idx = 0; idx < u.size(); ++idx) {
        double acc = 0.0;
        for (int p = 0; p < dim; ++p) acc += a(p) * std::pow(u[idx], p) / factorial(p);
        row.values[idx] = acc * k[idx] / nh;
    }
    return row;
}

std::vector<double> weights(std::size_t n, double h, const LocalPolyConfig& config, double x) {
    const auto row = weight_row(n, h, config, x);
    std::vector<double> out(n, 0.0);
    std::copy(row.values.begin(), row.values.end(), out.begin() + static_cast<long>(row.first - 1));
    return out;
}

struct LocalPolySmoother::Impl {
    // Lattice layout: design point i sits at lattice index i * design_stride,
    // grid point k at (first + k) * grid_stride; array position = lattice
    // index + reach.
    std::size_t lattice = 0;
    std::size_t design_stride = 0;
    std::size_t grid_stride = 0;
    std::size_t reach = 0;
    std::size_t padded = 0;

    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    std::vector<std::vector<std::complex<double>>> spectra;  // u^p K(u) / p!, p = 0..l
    std::vector<double> coef;                                // coef[k * dim + p] = a_p(x_k) / (nh)

    // Direct mode: explicit weight rows when the common lattice is too fine.
    std::vector<WeightRow> rows;

    ~Impl() {
        const std::scoped_lock lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
    }

    // out[q] = sum_d ker(d) in[q + d], for all q, as a circular correlation.
    void correlate(const double* in_real, const std::complex<double>* kernel_spectrum, double* out_real) const {
        const std::size_t half = padded / 2 + 1;
        auto* in = fftw_alloc_real(padded);
        auto* freq = fftw_alloc_complex(half);
        std::copy(in_real, in_real + padded, in);
        fftw_execute_dft_r2c(forward, in, freq);
        for (std::size_t q = 0; q < half; ++q) {
            const std::complex<double> v(freq[q][0], freq[q][1]);
            const auto prod = v * kernel_spectrum[q];
            freq[q][0] = prod.real();
            freq[q][1] = prod.imag();
        }
        fftw_execute_dft_c2r(backward, freq, out_real);
        fftw_free(in);
        fftw_free(freq);
    }
};

LocalPolySmoother::LocalPolySmoother(std::size_t n, double h, const LocalPolyConfig& config, const UniformGrid& grid)
    : n_(n), h_(h), config_(config), grid_(grid), impl_(std::make_unique<Impl>()) {
    check_inputs(n, h, config);
    if (grid.count == 0 || grid.denom == 0 || grid.first + grid.count - 1 > grid.denom) {
        throw ShapeError("evaluation grid must lie inside [0, 1]");
    }
    auto& im = *impl_;
    const std::size_t lattice = std::lcm(n, grid.denom);
    const double nh = static_cast<double>(n) * h;
    const int dim = config.l + 1;

    if (lattice > (std::size_t{1} << 24) || static_cast<double>(lattice) * std::min(h, 1.0) > 4.0e6) {
        // Rare: grids whose lattice with the design is too fine for the
        // correlation layout. Fall back to stored rows.
        im.rows.reserve(grid.count);
        for (std::size_t k = 0; k < grid.count; ++k) im.rows.push_back(weight_row(n, h, config, grid.at(k)));
        return;
    }

    im.lattice = lattice;
    im.design_stride = lattice / n;
    im.grid_stride = lattice / grid.denom;
    const double Nh = static_cast<double>(lattice) * h;
    im.reach = static_cast<std::size_t>(std::floor(std::min(Nh, 2.0 * static_cast<double>(lattice)) + 1e-9));
    im.padded = next_fast_size(lattice + 2 * im.reach + 1);
    const std::size_t P = im.padded;
    const std::size_t half = P / 2 + 1;
    const long D = static_cast<long>(im.reach);

    // Kernel tables u^s K(u), s = 0..2l, on lattice offsets |d| <= reach.
    const int moments = 2 * config.l + 1;
    std::vector<std::vector<double>> table(static_cast<std::size_t>(moments), std::vector<double>(P, 0.0));
    long positive_reach = -1;
    for (long d = -D; d <= D; ++d) {
        const double u = std::clamp(static_cast<double>(d) / Nh, -1.0, 1.0);
        const double kv = kernel_value(config.kernel, u);
        if (kv > 0.0) positive_reach = std::max(positive_reach, std::abs(d));
        const auto slot = static_cast<std::size_t>((-d % static_cast<long>(P) + static_cast<long>(P)) % static_cast<long>(P));
        double pw = 1.0;
        for (int s = 0; s < moments; ++s) {
            table[static_cast<std::size_t>(s)][slot] = pw * kv;
            pw *= u;
        }
    }

    {
        const std::scoped_lock lock(planner_mutex());
        auto* in = fftw_alloc_real(P);
        auto* freq = fftw_alloc_complex(half);
        im.forward = fftw_plan_dft_r2c_1d(static_cast<int>(P), in, freq, FFTW_ESTIMATE);
        im.backward = fftw_plan_dft_c2r_1d(static_cast<int>(P), freq, in, FFTW_ESTIMATE);
        fftw_free(in);
        fftw_free(freq);
    }
    if (!im.forward || !im.backward) throw NumericalError("FFT planning failed");

    std::vector<std::vector<std::complex<double>>> all_spectra(static_cast<std::size_t>(moments));
    {
        auto* in = fftw_alloc_real(P);
        auto* freq = fftw_alloc_complex(half);
        for (int s = 0; s < moments; ++s) {
            std::copy(table[static_cast<std::size_t>(s)].begin(), table[static_cast<std::size_t>(s)].end(), in);
            fftw_execute_dft_r2c(im.forward, in, freq);
            auto& out = all_spectra[static_cast<std::size_t>(s)];
            out.resize(half);
            for (std::size_t q = 0; q < half; ++q) out[q] = {freq[q][0] / static_cast<double>(P), freq[q][1] / static_cast<double>(P)};
        }
        fftw_free(in);
        fftw_free(freq);
    }
    for (int p = 0; p < dim; ++p) {
        auto freq = all_spectra[static_cast<std::size_t>(p)];
        const double inv = 1.0 / factorial(p);
        for (auto& v : freq) v *= inv;
        im.spectra.push_back(std::move(freq));
    }

    // Moments of the design mask at every grid point.
    std::vector<double> mask(P, 0.0);
    for (std::size_t i = 1; i <= n; ++i) mask[i * im.design_stride + im.reach] = 1.0;
    std::vector<std::vector<double>> mom(static_cast<std::size_t>(moments), std::vector<double>(grid.count));
    {
        auto* out = fftw_alloc_real(P);
        for (int s = 0; s < moments; ++s) {
            im.correlate(mask.data(), all_spectra[static_cast<std::size_t>(s)].data(), out);
            for (std::size_t k = 0; k < grid.count; ++k) {
                mom[static_cast<std::size_t>(s)][k] = out[(grid.first + k) * im.grid_stride + im.reach];
            }
        }
        fftw_free(out);
    }

    im.coef.assign(grid.count * static_cast<std::size_t>(dim), 0.0);
    const long stride = static_cast<long>(im.design_stride);
    for (std::size_t k = 0; k < grid.count; ++k) {
        const long pos = static_cast<long>((grid.first + k) * im.grid_stride);
        // Design points with positive kernel weight: |i * stride - pos| <= positive_reach.
        const long lo = std::max(1L, (pos - positive_reach + stride - 1) / stride);
        const long hi = std::min(static_cast<long>(n), (pos + positive_reach) / stride);
        if (positive_reach < 0 || hi - lo + 1 < dim) {
            throw BandwidthTooSmall("fewer than l + 1 design points inside the smoothing window");
        }
        Eigen::MatrixXd B(dim, dim);
        for (int p = 0; p < dim; ++p) {
            for (int q = 0; q < dim; ++q) {
                B(p, q) = mom[static_cast<std::size_t>(p + q)][k] / (factorial(p) * factorial(q) * nh);
            }
        }
        const Eigen::VectorXd a = solve_local(B, config.ridge_eps);
        for (int p = 0; p < dim; ++p) im.coef[k * static_cast<std::size_t>(dim) + static_cast<std::size_t>(p)] = a(p) / nh;
    }
}

LocalPolySmoother::~LocalPolySmoother() = default;

std::vector<double> LocalPolySmoother::apply(std::span<const double> y) const {
    if (y.size() != n_) throw ShapeError("smoother expects " + std::to_string(n_) + " observations");
    const auto& im = *impl_;
    std::vector<double> out(grid_.count, 0.0);

    if (!im.rows.empty()) {
        for (std::size_t k = 0; k < grid_.count; ++k) {
            const auto& row = im.rows[k];
            double acc = 0.0;
            for (std::size_t t = 0; t < row.values.size(); ++t) acc += row.values[t] * y[row.first - 1 + t];
            out[k] = acc;
        }
        return out;
    }

    const std::size_t P = im.padded;
    const std::size_t dim = static_cast<std::size_t>(config_.l + 1);
    auto* padded = fftw_alloc_real(P);
    auto* corr = fftw_alloc_real(P);
    std::fill(padded, padded + P, 0.0);
    for (std::size_t i = 1; i <= n_; ++i) padded[i * im.design_stride + im.reach] = y[i - 1];
    for (std::size_t p = 0; p < dim; ++p) {
        im.correlate(padded, im.spectra[p].data(), corr);
        for (std::size_t k = 0; k < grid_.count; ++k) {
            out[k] += im.coef[k * dim + p] * corr[(grid_.first + k) * im.grid_stride + im.reach];
        }
    }
    fftw_free(padded);
    fftw_free(corr);
    return out;
}

CurveEstimate estimate(const FixedDesignSample& sample, double h, const LocalPolyConfig& config,
                       const UniformGrid& grid) {
    const LocalPolySmoother smoother(sample.n, h, config, grid);
    return {grid, smoother.apply(sample.y), h, CurveEstimate::Provenance::raw};
}

CurveEstimate estimate(const FixedDesignSample& sample, double h, const LocalPolyConfig& config) {
    return estimate(sample, h, config, UniformGrid::design(sample.n));
}

CurveEstimate exact_mean(const TruthFunction& f, std::size_t n, double h, const LocalPolyConfig& config,
                         const UniformGrid& grid) {
    const LocalPolySmoother smoother(n, h, config, grid);
    return {grid, smoother.apply(f.on_design(n)), h, CurveEstimate::Provenance::raw};
}

WeightDiagnostics weight_diagnostics(std::size_t n, double h, const LocalPolyConfig& config) {
    check_inputs(n, h, config);
    const auto grid = UniformGrid::refined(n, 4);
    const double nd = static_cast<double>(n);
    const double nh = nd * h;
    const int dim = config.l + 1;

    WeightDiagnostics diag;
    diag.grid_points = grid.count;
    diag.locality_ok = true;
    diag.variance_proxy = std::sqrt(std::log(nd) / nh);
    for (std::size_t k = 0; k < grid.count; ++k) {
        const double x = grid.at(k);
        const auto row = weight_row(n, h, config, x);
        double sum_abs = 0.0;
        double sum_sq = 0.0;
        double bias = 0.0;
        std::vector<double> repro(static_cast<std::size_t>(dim), 0.0);
        for (std::size_t t = 0; t < row.values.size(); ++t) {
            const double w = row.values[t];
            const double xi = static_cast<double>(row.first + t) / nd;
            const double z = (xi - x) / h;
            if (std::abs(xi - x) > h * (1.0 + 1e-12) && w != 0.0) diag.locality_ok = false;
            diag.c1_sup = std::max(diag.c1_sup, nh * std::abs(w));
            sum_abs += std::abs(w);
            sum_sq += w * w;
            bias += std::abs(w) * std::pow(std::abs(z), dim);
            double pw = 1.0;
            for (int p = 0; p < dim; ++p) {
                repro[static_cast<std::size_t>(p)] += w * pw;
                pw *= xi;
            }
        }
        diag.c1_sum = std::max(diag.c1_sum, sum_abs);
        diag.max_sq_sum = std::max(diag.max_sq_sum, sum_sq);
        diag.bias_bound_const = std::max(diag.bias_bound_const, bias / factorial(dim));
        if (x >= h && x <= 1.0 - h) {
            double pw = 1.0;
            for (int p = 0; p < dim; ++p) {
                diag.poly_repro_err = std::max(diag.poly_repro_err, std::abs(repro[static_cast<std::size_t>(p)] - pw));
                pw *= x;
            }
        }
    }
    return diag;
}

double fit_variance_constant(std::size_t n, double h, const LocalPolyConfig& config, double sigma, std::size_t reps,
                             std::uint64_t seed, const ReplicateExecutor& executor) {
    if (reps == 0) throw ConfigError("variance fit needs at least one replicate");
    const LocalPolySmoother smoother(n, h, config, UniformGrid::refined(n, 4));
    std::vector<double> sq(reps, 0.0);
    executor(reps, [&](std::size_t rep) {
        std::vector<double> y(n, 0.0);
        add_noise(y, sigma, seed, rep);
        double sup = 0.0;
        for (const double v : smoother.apply(y)) sup = std::max(sup, std::abs(v));
        sq[rep] = sup * sup;
    });
    const double mean_sq = std::accumulate(sq.begin(), sq.end(), 0.0) / static_cast<double>(reps);
    const double nd = static_cast<double>(n);
    return std::sqrt(mean_sq * nd * h / std::log(nd));
}

}  // namespace acb
