#include "acb/regression.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "acb/errors.hpp"
#include "acb/random.hpp"
#include "acb/text.hpp"

namespace acb {

namespace {

using Params = std::map<std::string, std::string, std::less<>>;

Params parse_params(std::string_view body, std::string_view id) {
    Params out;
    for (const auto& item : text::split(body, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("malformed parameter '" + item + "' in truth '" + std::string(id) + "'");
        out[text::trim(item.substr(0, eq))] = text::trim(item.substr(eq + 1));
    }
    return out;
}

double need_double(const Params& p, std::string_view key, std::string_view id) {
    const auto it = p.find(key);
    if (it == p.end()) throw ConfigError("truth '" + std::string(id) + "' needs parameter " + std::string(key));
    return text::parse_double(it->second, key);
}

double get_double(const Params& p, std::string_view key, double fallback) {
    const auto it = p.find(key);
    return it == p.end() ? fallback : text::parse_double(it->second, key);
}

long get_long(const Params& p, std::string_view key, std::string_view id, std::optional<long> fallback = {}) {
    const auto it = p.find(key);
    if (it == p.end()) {
        if (fallback) return *fallback;
        throw ConfigError("truth '" + std::string(id) + "' needs parameter " + std::string(key));
    }
    return text::parse_long(it->second, key);
}

std::string get_string(const Params& p, std::string_view key, std::string_view fallback) {
    const auto it = p.find(key);
    return it == p.end() ? std::string(fallback) : it->second;
}

void check_known(const Params& p, std::initializer_list<std::string_view> known, std::string_view id) {
    for (const auto& [key, value] : p) {
        bool ok = false;
        for (const auto k : known) ok = ok || key == k;
        if (!ok) throw ConfigError("unknown parameter '" + key + "' in truth '" + std::string(id) + "'");
    }
}

TruthFunction analytic(std::string id, std::function<double(double)> fn) {
    TruthFunction f;
    f.id = std::move(id);
    f.kind = TruthFunction::Kind::analytic;
    f.eval_ = std::move(fn);
    return f;
}

}  // namespace

double rate(double t, std::size_t n) {
    if (n <= 2) throw DomainError("rate needs n >= 3");
    if (!(t > 0.0)) throw DomainError("rate needs t > 0");
    const double nd = static_cast<double>(n);
    return std::pow(std::log(nd) / nd, t / (2.0 * t + 1.0));
}

std::vector<double> TruthFunction::on_design(std::size_t n) const { return on_lattice(n, 1, n); }

std::vector<double> TruthFunction::on_lattice(std::size_t denom, std::size_t first, std::size_t count) const {
    std::vector<double> out(count);
    const double d = static_cast<double>(denom);
    for (std::size_t k = 0; k < count; ++k) out[k] = eval_(static_cast<double>(first + k) / d);
    return out;
}

TruthFunction random_ball_function(const wavelet::WaveletFamily& family, const wavelet::HolderBall& ball, int J,
                                   std::uint64_t seed) {
    if (J < 1 || J > 20) throw ConfigError("ball draw level J must lie in [1, 20]");
    const rng::UniformStream stream(seed);
    auto coeffs = wavelet::WaveletCoefficients::zeros(0, J);
    coeffs.phi[0] = stream.between(0, -ball.B, ball.B);
    for (int j = 0; j < J; ++j) {
        const double thr = ball.B * std::exp2(-static_cast<double>(j) * (ball.t + 0.5));
        auto& level = coeffs.level(j);
        for (std::size_t m = 0; m < level.size(); ++m) {
            level[m] = stream.between((std::uint64_t{1} << j) + m, -thr, thr);
        }
    }

    TruthFunction f;
    f.kind = TruthFunction::Kind::coefficient;
    f.t = ball.t;
    f.B = ball.B;
    f.coeffs = std::make_shared<const wavelet::WaveletCoefficients>(std::move(coeffs));
    f.family = std::make_shared<const wavelet::WaveletFamily>(family);
    f.id = "ball:t=" + text::format_double(ball.t) + ",B=" + text::format_double(ball.B) +
           ",seed=" + std::to_string(seed) + ",J=" + std::to_string(J) + ",family=" + family.name();
    f.eval_ = [c = f.coeffs, fam = f.family](double x) { return wavelet::evaluate_expansion(*c, *fam, x); };
    return f;
}

TruthFunction spike_truth(const wavelet::WaveletFamily& family, int j, long m, double r, double amp) {
    if (j < 0 || j > 30) throw ConfigError("spike level must lie in [0, 30]");
    if (!(r > 0.0)) throw ConfigError("spike smoothness r must be positive");
    const long k = m * family.c0_inverse();
    if (m < 1 || k + family.support_length() > (1L << j)) {
        throw ConfigError("spike m=" + std::to_string(m) + " at level " + std::to_string(j) +
                          " is not supported inside [0, 1] for " + family.name());
    }
    const double coefficient = amp * std::exp2(-static_cast<double>(j) * (r + 0.5));
    TruthFunction f;
    f.kind = TruthFunction::Kind::spike;
    f.t = r;
    f.B = std::abs(amp);
    f.family = std::make_shared<const wavelet::WaveletFamily>(family);
    f.id = "spike:j=" + std::to_string(j) + ",m=" + std::to_string(m) + ",r=" + text::format_double(r) +
           ",amp=" + text::format_double(amp) + ",family=" + family.name();
    f.eval_ = [fam = f.family, j, k, coefficient](double x) {
        return coefficient * wavelet::evaluate_wavelet(*fam, j, static_cast<double>(k), x);
    };
    return f;
}

TruthFunction parse_truth(std::string_view raw) {
    const std::string id = text::trim(raw);
    const auto colon = id.find(':');
    const std::string head = id.substr(0, colon);
    const Params p = colon == std::string::npos ? Params{} : parse_params(std::string_view(id).substr(colon + 1), id);

    if (head == "zero" || head == "linear" || head == "sine") {
        if (!p.empty()) throw ConfigError("truth '" + head + "' takes no parameters");
        if (head == "zero") {
            auto f = analytic(head, [](double) { return 0.0; });
            f.B = 0.0;
            return f;
        }
        if (head == "linear") return analytic(head, [](double x) { return x; });
        return analytic(head, [](double x) { return std::sin(2.0 * std::numbers::pi * x); });
    }
    if (head == "weierstrass") {
        check_known(p, {"t", "K"}, id);
        const double t = need_double(p, "t", id);
        const long K = get_long(p, "K", id, 12);
        if (!(t > 0.0) || K < 0 || K > 40) throw ConfigError("weierstrass truth needs t > 0 and 0 <= K <= 40");
        auto f = analytic(id, [t, K](double x) {
            double acc = 0.0;
            for (long k = 0; k <= K; ++k) {
                const double scale = std::exp2(static_cast<double>(k));
                acc += std::exp2(-static_cast<double>(k) * t) * std::cos(2.0 * std::numbers::pi * scale * x);
            }
            return acc;
        });
        f.t = t;
        return f;
    }
    if (head == "cusp") {
        check_known(p, {"t"}, id);
        const double t = need_double(p, "t", id);
        if (!(t > 0.0)) throw ConfigError("cusp truth needs t > 0");
        // |x - 1/2|^t; for even integer t the sign is kept so the kink survives.
        const bool keep_sign = std::fmod(t, 2.0) == 0.0;
        auto f = analytic(id, [t, keep_sign](double x) {
            const double d = x - 0.5;
            const double v = std::pow(std::abs(d), t);
            return keep_sign && d < 0.0 ? -v : v;
        });
        f.t = t;
        return f;
    }
    if (head == "ball") {
        check_known(p, {"t", "B", "seed", "J", "family"}, id);
        const wavelet::HolderBall ball(need_double(p, "t", id), need_double(p, "B", id));
        const long seed = get_long(p, "seed", id);
        const long J = get_long(p, "J", id, 12);
        const auto family = wavelet::build_family(get_string(p, "family", "db3"));
        return random_ball_function(family, ball, static_cast<int>(J), static_cast<std::uint64_t>(seed));
    }
    if (head == "spike") {
        check_known(p, {"j", "m", "r", "amp", "family"}, id);
        const auto family = wavelet::build_family(get_string(p, "family", "db3"));
        return spike_truth(family, static_cast<int>(get_long(p, "j", id)), get_long(p, "m", id), need_double(p, "r", id),
                           get_double(p, "amp", 1.0));
    }
    throw ConfigError("unknown truth '" + id + "'");
}

std::vector<TruthFunction> parse_truth_list(std::string_view list) {
    std::vector<TruthFunction> out;
    for (const auto& item : text::split(list, ';')) {
        if (!text::trim(item).empty()) out.push_back(parse_truth(item));
    }
    if (out.empty()) throw ConfigError("truth list is empty");
    return out;
}

void add_noise(std::span<double> y, double sigma, std::uint64_t seed, std::uint64_t replicate) {
    if (!(sigma >= 0.0)) throw DomainError("noise level must be nonnegative");
    if (sigma == 0.0) return;
    std::vector<double> z(y.size());
    rng::NormalStream(seed).fill(replicate * y.size(), z);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += sigma * z[i];
}

FixedDesignSample simulate_values(std::span<const double> truth_values, double sigma, std::uint64_t seed,
                                  std::uint64_t replicate, std::string truth_id) {
    if (truth_values.size() < 2) throw DomainError("simulate needs n >= 2");
    FixedDesignSample s;
    s.n = truth_values.size();
    s.sigma = sigma;
    s.seed = seed;
    s.replicate = replicate;
    s.truth_id = std::move(truth_id);
    s.y.assign(truth_values.begin(), truth_values.end());
    add_noise(s.y, sigma, seed, replicate);
    return s;
}

FixedDesignSample simulate(const TruthFunction& f, std::size_t n, double sigma, std::uint64_t seed,
                           std::uint64_t replicate) {
    if (n < 2) throw DomainError("simulate needs n >= 2");
    const auto values = f.on_design(n);
    return simulate_values(values, sigma, seed, replicate, f.id);
}

}  // namespace acb
