#include "acb/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

#include <Eigen/Dense>

#include "acb/errors.hpp"

namespace acb::wavelet {

namespace {

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

int log2_exact(std::size_t v) {
    int k = 0;
    while ((std::size_t{1} << k) < v) ++k;
    return k;
}

double haar_phi(double y) { return (y >= 0.0 && y < 1.0) ? 1.0 : 0.0; }

double haar_psi(double y) {
    if (y < 0.0 || y >= 1.0) return 0.0;
    return y < 0.5 ? 1.0 : -1.0;
}

double interpolate(const std::vector<double>& table, int depth, int length, double y) {
    if (!(y > 0.0) || !(y < static_cast<double>(length))) return 0.0;
    const double pos = std::ldexp(y, depth);
    const auto idx = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(idx);
    if (idx + 1 >= table.size()) return table.back();
    if (frac == 0.0) return table[idx];
    return table[idx] + frac * (table[idx + 1] - table[idx]);
}

// One analysis step of the periodized filter bank on a sequence of even
// length 2M.
void analysis_step(std::span<const double> in, std::span<const double> h, std::span<const double> g,
                   std::vector<double>& approx, std::vector<double>& detail) {
    const std::size_t len = in.size();
    const std::size_t half = len / 2;
    approx.assign(half, 0.0);
    detail.assign(half, 0.0);
    for (std::size_t k = 0; k < half; ++k) {
        double a = 0.0;
        double d = 0.0;
        for (std::size_t t = 0; t < h.size(); ++t) {
            const double v = in[(2 * k + t) % len];
            a += h[t] * v;
            d += g[t] * v;
        }
        approx[k] = a;
        detail[k] = d;
    }
}

std::vector<double> synthesis_step(std::span<const double> approx, std::span<const double> detail,
                                   std::span<const double> h, std::span<const double> g) {
    const std::size_t half = approx.size();
    const std::size_t len = 2 * half;
    std::vector<double> out(len, 0.0);
    for (std::size_t k = 0; k < half; ++k) {
        for (std::size_t t = 0; t < h.size(); ++t) {
            out[(2 * k + t) % len] += h[t] * approx[k] + g[t] * detail[k];
        }
    }
    return out;
}

double level_threshold(const HolderBall& ball, int j) {
    return ball.B * std::exp2(-static_cast<double>(j) * (ball.t + 0.5));
}

}  // namespace

double CascadeTable::phi_at(double y) const { return interpolate(phi, depth, length, y); }

double CascadeTable::psi_at(double y) const { return interpolate(psi, depth, length, y); }

WaveletFamily::WaveletFamily(std::string name, std::vector<double> lowpass, int vanishing_moments)
    : name_(std::move(name)), lowpass_(std::move(lowpass)), vanishing_moments_(vanishing_moments) {
    if (lowpass_.size() < 2 || lowpass_.size() % 2 != 0) {
        throw ConfigError("wavelet filter must have an even number of taps");
    }
    const std::size_t L = lowpass_.size();
    highpass_.resize(L);
    for (std::size_t k = 0; k < L; ++k) {
        highpass_[k] = ((k % 2 == 0) ? 1.0 : -1.0) * lowpass_[L - 1 - k];
    }
    table_ = std::make_shared<const CascadeTable>(cascade(*this, kDefaultDepth));
    if (is_haar()) {
        psi_l1_ = 1.0;
        psi_sup_ = 1.0;
    } else {
        const auto& psi = table_->psi;
        const double step = std::ldexp(1.0, -table_->depth);
        double l1 = 0.0;
        double sup = 0.0;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            const double w = (i == 0 || i + 1 == psi.size()) ? 0.5 : 1.0;
            l1 += w * std::abs(psi[i]);
            sup = std::max(sup, std::abs(psi[i]));
        }
        psi_l1_ = l1 * step;
        psi_sup_ = sup;
    }
}

double WaveletFamily::phi(double y) const { return is_haar() ? haar_phi(y) : table_->phi_at(y); }

double WaveletFamily::psi(double y) const { return is_haar() ? haar_psi(y) : table_->psi_at(y); }

WaveletFamily build_family(std::string_view name) {
    if (name == "haar") {
        const double s = std::numbers::sqrt2 / 2.0;
        return WaveletFamily("haar", {s, s}, 1);
    }
    if (name == "db2") {
        return WaveletFamily("db2",
                             {0.48296291314453414337, 0.83651630373780790558, 0.22414386804201338103,
                              -0.12940952255126038117},
                             2);
    }
    if (name == "db3") {
        return WaveletFamily("db3",
                             {0.332670552950082616, 0.80689150931109257649, 0.4598775021184915701,
                              -0.1350110200102545887, -0.085441273882026661693, 0.035226291885709536603},
                             3);
    }
    if (name == "db4") {
        return WaveletFamily("db4",
                             {0.23037781330889650086, 0.71484657055291564709, 0.63088076792985890788,
                              -0.027983769416859854211, -0.18703481171909308408, 0.030841381835560763627,
                              0.032883011666885199735, -0.010597401785069032105},
                             4);
    }
    throw ConfigError("unknown wavelet family '" + std::string(name) + "' (expected haar, db2, db3 or db4)");
}

CascadeTable cascade(const WaveletFamily& family, int depth) {
    if (depth < 0 || depth > 20) throw DomainError("cascade depth must lie in [0, 20]");
    const auto h = family.lowpass();
    const auto g = family.highpass();
    const int len = family.support_length();
    const std::size_t scale = std::size_t{1} << depth;
    const std::size_t size = static_cast<std::size_t>(len) * scale + 1;

    CascadeTable table;
    table.depth = depth;
    table.length = len;
    table.phi.assign(size, 0.0);
    table.psi.assign(size, 0.0);

    if (family.is_haar()) {
        for (std::size_t p = 0; p + 1 < size; ++p) {
            const double y = static_cast<double>(p) / static_cast<double>(scale);
            table.phi[p] = haar_phi(y);
            table.psi[p] = haar_psi(y);
        }
        return table;
    }

    // phi at the integers: eigenvector of the two-scale matrix for
    // eigenvalue 1, normalized to sum 1.
    const int count = len + 1;
    Eigen::MatrixXd system = Eigen::MatrixXd::Zero(count + 1, count);
    for (int i = 0; i < count; ++i) {
        for (int k = 0; k < static_cast<int>(h.size()); ++k) {
            const int col = 2 * i - k;
            if (col >= 0 && col < count) system(i, col) += std::numbers::sqrt2 * h[static_cast<std::size_t>(k)];
        }
        system(i, i) -= 1.0;
        system(count, i) = 1.0;
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(count + 1);
    rhs(count) = 1.0;
    const Eigen::VectorXd integers = system.colPivHouseholderQr().solve(rhs);
    for (int i = 0; i < count; ++i) table.phi[static_cast<std::size_t>(i) * scale] = integers(i);
    table.phi.front() = 0.0;
    table.phi.back() = 0.0;

    const auto two_scale = [&](std::span<const double> filter, std::size_t p) {
        double acc = 0.0;
        for (std::size_t k = 0; k < filter.size(); ++k) {
            const long idx = 2 * static_cast<long>(p) - static_cast<long>(k * scale);
            if (idx >= 0 && idx < static_cast<long>(size)) acc += filter[k] * table.phi[static_cast<std::size_t>(idx)];
        }
        return std::numbers::sqrt2 * acc;
    };

    for (int level = 1; level <= depth; ++level) {
        const std::size_t step = std::size_t{1} << (depth - level);
        for (std::size_t p = step; p < size; p += 2 * step) table.phi[p] = two_scale(h, p);
    }
    for (std::size_t p = 0; p < size; ++p) table.psi[p] = two_scale(g, p);
    table.psi.front() = 0.0;
    table.psi.back() = 0.0;
    return table;
}

double evaluate_wavelet(const WaveletFamily& family, int j, double m, double x, int depth) {
    const double y = std::ldexp(x, j) - m;
    const double amp = std::exp2(0.5 * j);
    if (family.is_haar()) return amp * haar_psi(y);
    if (depth == family.table().depth) return amp * family.table().psi_at(y);
    return amp * cascade(family, depth).psi_at(y);
}

HolderBall::HolderBall(double t_, double B_) : t(t_), B(B_) {
    if (!(t > 0.0)) throw DomainError("Holder exponent must be positive");
    if (!(B > 0.0)) throw DomainError("Holder ball radius must be positive");
}

WaveletCoefficients WaveletCoefficients::zeros(int j0, int J) {
    if (j0 < 0 || j0 > J) throw ShapeError("coefficient tree needs 0 <= j0 <= J");
    WaveletCoefficients c;
    c.j0 = j0;
    c.J = J;
    c.phi.assign(std::size_t{1} << j0, 0.0);
    for (int j = j0; j < J; ++j) c.psi.emplace_back(std::size_t{1} << j, 0.0);
    return c;
}

void WaveletCoefficients::validate() const {
    if (j0 < 0 || j0 > J) throw ShapeError("coefficient tree needs 0 <= j0 <= J");
    if (phi.size() != (std::size_t{1} << j0)) throw ShapeError("coarse level must hold 2^j0 coefficients");
    if (psi.size() != static_cast<std::size_t>(J - j0)) throw ShapeError("coefficient tree must hold J - j0 levels");
    for (int j = j0; j < J; ++j) {
        if (level(j).size() != (std::size_t{1} << j)) {
            throw ShapeError("level " + std::to_string(j) + " must hold 2^j coefficients");
        }
    }
}

WaveletCoefficients operator-(const WaveletCoefficients& a, const WaveletCoefficients& b) {
    a.validate();
    b.validate();
    if (a.j0 != b.j0 || a.J != b.J) throw ShapeError("coefficient trees have different level ranges");
    WaveletCoefficients out = a;
    for (std::size_t m = 0; m < out.phi.size(); ++m) out.phi[m] -= b.phi[m];
    for (std::size_t l = 0; l < out.psi.size(); ++l) {
        for (std::size_t m = 0; m < out.psi[l].size(); ++m) out.psi[l][m] -= b.psi[l][m];
    }
    return out;
}

WaveletCoefficients scaled(const WaveletCoefficients& c, double factor) {
    WaveletCoefficients out = c;
    for (auto& v : out.phi) v *= factor;
    for (auto& lvl : out.psi) {
        for (auto& v : lvl) v *= factor;
    }
    return out;
}

WaveletCoefficients analyze(std::span<const double> values, const WaveletFamily& family, int j0) {
    if (!is_power_of_two(values.size())) throw ShapeError("analyze needs a power-of-two number of grid values");
    const int J = log2_exact(values.size());
    if (j0 < 0 || j0 >= J) throw ShapeError("analyze needs 0 <= j0 < J");

    const double norm = std::exp2(-0.5 * J);
    std::vector<double> approx(values.begin(), values.end());
    for (auto& v : approx) v *= norm;

    WaveletCoefficients out = WaveletCoefficients::zeros(j0, J);
    std::vector<double> next;
    std::vector<double> detail;
    for (int j = J - 1; j >= j0; --j) {
        analysis_step(approx, family.lowpass(), family.highpass(), next, detail);
        out.level(j) = detail;
        approx.swap(next);
    }
    out.phi = approx;
    return out;
}

std::vector<double> synthesize(const WaveletCoefficients& coeffs, const WaveletFamily& family) {
    coeffs.validate();
    std::vector<double> approx = coeffs.phi;
    for (int j = coeffs.j0; j < coeffs.J; ++j) {
        approx = synthesis_step(approx, coeffs.level(j), family.lowpass(), family.highpass());
    }
    const double norm = std::exp2(0.5 * coeffs.J);
    for (auto& v : approx) v *= norm;
    return approx;
}

double holder_norm(const WaveletCoefficients& coeffs, double t) {
    if (!(t > 0.0)) throw DomainError("Holder exponent must be positive");
    double norm = 0.0;
    for (const double v : coeffs.phi) norm = std::max(norm, std::abs(v));
    for (int j = coeffs.j0; j < coeffs.J; ++j) {
        const double weight = std::exp2(static_cast<double>(j) * (t + 0.5));
        for (const double v : coeffs.level(j)) norm = std::max(norm, std::abs(v) * weight);
    }
    return norm;
}

bool in_ball(const WaveletCoefficients& coeffs, const HolderBall& ball) {
    return holder_norm(coeffs, ball.t) <= ball.B * (1.0 + 1e-12);
}

WaveletCoefficients project_to_ball(const WaveletCoefficients& coeffs, const HolderBall& ball) {
    WaveletCoefficients out = coeffs;
    for (auto& v : out.phi) v = std::clamp(v, -ball.B, ball.B);
    for (int j = out.j0; j < out.J; ++j) {
        const double thr = level_threshold(ball, j);
        for (auto& v : out.level(j)) v = std::clamp(v, -thr, thr);
    }
    return out;
}

std::span<const double> discrete_l1_norms(const WaveletFamily& family, int J) {
    static std::mutex mutex;
    static std::map<std::pair<std::string, int>, std::vector<double>> cache;
    const std::scoped_lock lock(mutex);
    auto [it, inserted] = cache.try_emplace({family.name(), J});
    if (inserted) {
        std::vector<double> norms(static_cast<std::size_t>(J), 0.0);
        for (int j = 0; j < J; ++j) {
            auto unit = WaveletCoefficients::zeros(0, J);
            unit.level(j)[0] = 1.0;
            const auto grid = synthesize(unit, family);
            double total = 0.0;
            for (const double v : grid) total += std::abs(v);
            norms[static_cast<std::size_t>(j)] = total / static_cast<double>(grid.size());
        }
        it->second = std::move(norms);
    }
    return it->second;
}

DistanceBounds distance_bounds(const WaveletCoefficients& coeffs, const HolderBall& ball, const WaveletFamily& family) {
    coeffs.validate();
    const auto residual = coeffs - project_to_ball(coeffs, ball);

    DistanceBounds bounds;
    for (const double v : synthesize(residual, family)) bounds.upper = std::max(bounds.upper, std::abs(v));

    const auto discrete = discrete_l1_norms(family, coeffs.J);
    for (int j = coeffs.j0; j < coeffs.J; ++j) {
        const double continuous = std::exp2(-0.5 * j) * family.psi_l1();
        const double denom = std::max(continuous, discrete[static_cast<std::size_t>(j)]);
        for (const double v : residual.level(j)) bounds.lower = std::max(bounds.lower, std::abs(v) / denom);
    }
    return bounds;
}

double evaluate_expansion(const WaveletCoefficients& coeffs, const WaveletFamily& family, double x) {
    const int len = family.support_length();
    const auto periodic_sum = [&](std::span<const double> level, int j, bool scaling) {
        const long period = 1L << j;
        const double y = std::ldexp(x, j);
        const long top = static_cast<long>(std::floor(y));
        double acc = 0.0;
        for (long k = top - len; k <= top; ++k) {
            const long m = ((k % period) + period) % period;
            const double c = level[static_cast<std::size_t>(m)];
            if (c == 0.0) continue;
            const double arg = y - static_cast<double>(k);
            acc += c * (scaling ? family.phi(arg) : family.psi(arg));
        }
        return std::exp2(0.5 * j) * acc;
    };
    double value = periodic_sum(coeffs.phi, coeffs.j0, true);
    for (int j = coeffs.j0; j < coeffs.J; ++j) value += periodic_sum(coeffs.level(j), j, false);
    return value;
}

std::vector<double> Spike::dense(std::size_t n) const {
    std::vector<double> out(n, 0.0);
    for (std::size_t i = first; i <= last && i <= n; ++i) out[i - 1] = values[i - first];
    return out;
}

SpikeSet spike_set(const WaveletFamily& family, int j, double r, std::size_t n, double scale) {
    if (j < 0 || j > 30) throw ConfigError("spike level must lie in [0, 30]");
    if (!(r > 0.0)) throw DomainError("spike smoothness must be positive");
    if (n < 2) throw DomainError("spike tabulation needs n >= 2");

    SpikeSet set;
    set.family = family.name();
    set.j = j;
    set.r = r;
    set.scale = scale;
    set.n = n;
    const long period = 1L << j;
    const long spacing = family.c0_inverse();
    set.nominal_count = static_cast<std::size_t>((period - 1) / spacing);

    const double coefficient = scale * std::exp2(-static_cast<double>(j) * (r + 0.5));
    const double height = scale * std::exp2(-static_cast<double>(j) * r);
    const double nd = static_cast<double>(n);
    for (std::size_t m = 1; m <= set.nominal_count; ++m) {
        const long k = static_cast<long>(m) * spacing;
        if (k + family.support_length() > period) continue;
        Spike s;
        s.index = m;
        s.translation = k;
        s.coefficient = coefficient;
        const double left = static_cast<double>(k) / static_cast<double>(period);
        const double right = static_cast<double>(k + family.support_length()) / static_cast<double>(period);
        s.first = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(nd * left)));
        s.last = std::min<std::size_t>(n, static_cast<std::size_t>(std::floor(nd * right)));
        if (s.last < s.first) s.last = s.first;
        s.values.reserve(s.last - s.first + 1);
        for (std::size_t i = s.first; i <= s.last; ++i) {
            const double x = static_cast<double>(i) / nd;
            // 2^{-jr} psi(2^j x - k) written without the separate 2^{j/2}
            // factors so dyadic cases stay exact.
            const double y = std::ldexp(x, j) - static_cast<double>(k);
            s.values.push_back(height * evaluate_wavelet(family, 0, 0.0, y));
        }
        set.members.push_back(std::move(s));
    }
    if (set.members.empty()) {
        throw ConfigError("level " + std::to_string(j) + " has no interior spike translation for " + family.name());
    }
    return set;
}

WaveletCoefficients spike_coefficients(const SpikeSet& set, const Spike& spike, int j0, int J) {
    if (set.j < j0 || set.j >= J) throw ShapeError("spike level outside the coefficient tree");
    auto tree = WaveletCoefficients::zeros(j0, J);
    const long period = 1L << set.j;
    tree.level(set.j)[static_cast<std::size_t>(spike.translation % period)] = spike.coefficient;
    return tree;
}

void to_json(nlohmann::json& out, const WaveletCoefficients& coeffs) {
    out = nlohmann::json{{"j0", coeffs.j0}, {"J", coeffs.J}, {"phi", coeffs.phi}, {"psi", coeffs.psi}};
}

void from_json(const nlohmann::json& in, WaveletCoefficients& coeffs) {
    in.at("j0").get_to(coeffs.j0);
    in.at("J").get_to(coeffs.J);
    in.at("phi").get_to(coeffs.phi);
    in.at("psi").get_to(coeffs.psi);
    coeffs.validate();
}

}  // namespace acb::wavelet
