#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace acb::wavelet {

// Dyadic resolution 2^-depth of the tabulated scaling function and wavelet.
inline constexpr int kDefaultDepth = 12;

// phi and psi sampled at k / 2^depth on [0, length]; values in between are
// linearly interpolated.
struct CascadeTable {
    int depth = kDefaultDepth;
    int length = 1;
    std::vector<double> phi;
    std::vector<double> psi;

    double phi_at(double y) const;
    double psi_at(double y) const;
};

// Compactly supported orthonormal wavelet. phi and psi are both supported on
// [0, support_b] with support_a = 0; the highpass filter is
// g_k = (-1)^k h_{L-1-k}.
class WaveletFamily {
public:
    WaveletFamily(std::string name, std::vector<double> lowpass, int vanishing_moments);

    const std::string& name() const { return name_; }
    std::span<const double> lowpass() const { return lowpass_; }
    std::span<const double> highpass() const { return highpass_; }
    int support_a() const { return 0; }
    int support_b() const { return static_cast<int>(lowpass_.size()) - 1; }
    int support_length() const { return support_b() - support_a(); }
    int vanishing_moments() const { return vanishing_moments_; }
    bool is_haar() const { return lowpass_.size() == 2; }

    // c0 = 1 / ceil(b - a); spikes sit at translations m / c0.
    int c0_inverse() const { return support_length(); }
    double c0() const { return 1.0 / c0_inverse(); }

    // Mother functions on the default cascade table (closed form for Haar).
    double phi(double y) const;
    double psi(double y) const;

    // ||psi||_1 and ||psi||_inf by dyadic quadrature at the default depth.
    double psi_l1() const { return psi_l1_; }
    double psi_sup() const { return psi_sup_; }

    const CascadeTable& table() const { return *table_; }

private:
    std::string name_;
    std::vector<double> lowpass_;
    std::vector<double> highpass_;
    int vanishing_moments_;
    std::shared_ptr<const CascadeTable> table_;
    double psi_l1_ = 0.0;
    double psi_sup_ = 0.0;
};

// haar, db2, db3, db4 (dbN has N vanishing moments). Throws ConfigError.
WaveletFamily build_family(std::string_view name);

// Cascade iteration of the two-scale relation down to resolution 2^-depth.
CascadeTable cascade(const WaveletFamily& family, int depth);

// 2^{j/2} psi(2^j x - m), zero outside the support.
double evaluate_wavelet(const WaveletFamily& family, int j, double m, double x, int depth = kDefaultDepth);

struct HolderBall {
    double t;
    double B;

    HolderBall(double t, double B);
};

// Multilevel periodized coefficient tree. Level j holds 2^j coefficients.
struct WaveletCoefficients {
    int j0 = 0;
    int J = 0;
    std::vector<double> phi;
    std::vector<std::vector<double>> psi;  // psi[j - j0]

    static WaveletCoefficients zeros(int j0, int J);

    std::vector<double>& level(int j) { return psi.at(static_cast<std::size_t>(j - j0)); }
    const std::vector<double>& level(int j) const { return psi.at(static_cast<std::size_t>(j - j0)); }

    // Throws ShapeError unless every level has its periodized size.
    void validate() const;

    bool operator==(const WaveletCoefficients&) const = default;
};

WaveletCoefficients operator-(const WaveletCoefficients& a, const WaveletCoefficients& b);
WaveletCoefficients scaled(const WaveletCoefficients& c, double factor);

// Orthonormal periodized transform of grid values v_k = f(k / 2^J),
// k = 0..2^J-1. The values are scaled by 2^{-J/2} so that coefficients
// approximate the L2 inner products <phi_{j0,m}, f> and <psi_{jm}, f>.
WaveletCoefficients analyze(std::span<const double> values, const WaveletFamily& family, int j0);

// Exact inverse of analyze.
std::vector<double> synthesize(const WaveletCoefficients& coeffs, const WaveletFamily& family);

// max(sup_m |<phi_m,f>|, sup_{j,m} 2^{j(t+1/2)} |<psi_jm,f>|)
double holder_norm(const WaveletCoefficients& coeffs, double t);

// holder_norm <= B, with a relative slack of a few ulps.
bool in_ball(const WaveletCoefficients& coeffs, const HolderBall& ball);

// Coefficient-wise clipping to the ball thresholds, signs preserved.
WaveletCoefficients project_to_ball(const WaveletCoefficients& coeffs, const HolderBall& ball);

struct DistanceBounds {
    double lower = 0.0;
    double upper = 0.0;
};

// Two-sided computable surrogate for the sup-norm distance to the ball.
// upper is the grid sup of the clipped-away residual; lower is the largest
// single-coefficient excess divided by the L1 norm of the corresponding
// basis function (the larger of the continuous and the discrete one, so the
// bound holds on the grid as well).
DistanceBounds distance_bounds(const WaveletCoefficients& coeffs, const HolderBall& ball, const WaveletFamily& family);

// Mean absolute grid value of the level-j basis vector in a 2^J transform,
// i.e. the discrete counterpart of ||psi_jm||_1. Cached per (family, J).
std::span<const double> discrete_l1_norms(const WaveletFamily& family, int J);

// Pointwise value of the periodized expansion sum_m phi_m + sum_{j,m} psi_jm
// at x in [0, 1].
double evaluate_expansion(const WaveletCoefficients& coeffs, const WaveletFamily& family, double x);

struct Spike {
    std::size_t index = 0;       // m, 1-based
    long translation = 0;        // m / c0
    double coefficient = 0.0;    // scale * 2^{-j(r+1/2)}
    std::size_t first = 0;       // design indices [first, last] (1-based) covering the support
    std::size_t last = 0;
    std::vector<double> values;  // f_m(i/n) for i in [first, last]

    double value_at(std::size_t i) const {
        return (i < first || i > last) ? 0.0 : values[i - first];
    }
    std::vector<double> dense(std::size_t n) const;
};

// Disjointly supported alternatives f_m = scale * 2^{-j(r+1/2)} psi_{j, m/c0},
// tabulated on the design grid i/n.
struct SpikeSet {
    std::string family;
    int j = 0;
    double r = 0.0;
    double scale = 1.0;
    std::size_t n = 0;
    std::size_t nominal_count = 0;  // floor(c0 (2^j - 1))
    std::vector<Spike> members;     // those whose support lies in [0, 1]

    std::size_t count() const { return members.size(); }
};

// Throws ConfigError when no translation is interior at level j.
SpikeSet spike_set(const WaveletFamily& family, int j, double r, std::size_t n, double scale = 1.0);

// Coefficient tree (levels j0..J-1) holding the single coefficient of a spike.
WaveletCoefficients spike_coefficients(const SpikeSet& set, const Spike& spike, int j0, int J);

void to_json(nlohmann::json& out, const WaveletCoefficients& coeffs);
void from_json(const nlohmann::json& in, WaveletCoefficients& coeffs);

}  // namespace acb::wavelet
