#include "acb/lower_bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "acb/errors.hpp"
#include "acb/regression.hpp"
#include "acb/stats.hpp"

namespace acb {

namespace {

double member_dot(const wavelet::Spike& s, std::span<const double> y) {
    double acc = 0.0;
    for (std::size_t i = s.first; i <= s.last; ++i) acc += s.values[i - s.first] * y[i - 1];
    return acc;
}

// log(mean(exp(v)))
double log_mean_exp(std::span<const double> v) {
    const double top = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(top)) return top;
    double acc = 0.0;
    for (const double x : v) acc += std::exp(x - top);
    return top + std::log(acc) - std::log(static_cast<double>(v.size()));
}

std::vector<double> noise(std::size_t n, double sigma, std::uint64_t seed, std::uint64_t replicate) {
    std::vector<double> y(n, 0.0);
    add_noise(y, sigma, seed, replicate);
    return y;
}

void finish(TestingRiskReport& r, std::size_t type1_hits, const std::vector<std::size_t>& type2_hits) {
    const auto reps = static_cast<double>(r.replicates);
    r.type1 = static_cast<double>(type1_hits) / reps;
    r.worst_type2 = 0.0;
    for (std::size_t m = 0; m < type2_hits.size(); ++m) {
        const double p = static_cast<double>(type2_hits[m]) / reps;
        if (m == 0 || p > r.worst_type2) {
            r.worst_type2 = p;
            r.worst_member = m;
        }
    }
    r.risk = r.type1 + r.worst_type2;
    r.type1_se = stats::binomial_se(r.type1, r.replicates);
    r.type2_se = stats::binomial_se(r.worst_type2, r.replicates);
    r.se = std::hypot(r.type1_se, r.type2_se);
    r.alternatives = type2_hits.size();
}

}  // namespace

wavelet::SpikeSet TestingProblem::spikes() const {
    if (n < 8) throw ConfigError("testing problems need n >= 8");
    if (!(sigma > 0.0)) throw DomainError("testing problems need sigma > 0");
    return wavelet::spike_set(wavelet::build_family(family), j, r, n, amp);
}

double alpha_sq(const wavelet::Spike& spike) {
    double acc = 0.0;
    for (const double v : spike.values) acc += v * v;
    return acc;
}

double likelihood_ratio(double alpha, double zeta, double sigma) {
    return std::exp(alpha * zeta / sigma - alpha * alpha / (2.0 * sigma * sigma));
}

LikelihoodSample likelihood_from_data(const wavelet::SpikeSet& set, std::span<const double> y, double sigma) {
    if (y.size() != set.n) throw ShapeError("observations do not match the spike grid");
    if (!(sigma > 0.0)) throw DomainError("likelihood ratios need sigma > 0");
    LikelihoodSample out;
    const std::size_t M = set.count();
    out.zeta.resize(M);
    out.xi.resize(M);
    out.alpha_sq.resize(M);
    std::vector<double> log_xi(M);
    for (std::size_t m = 0; m < M; ++m) {
        const auto& s = set.members[m];
        const double a2 = alpha_sq(s);
        if (!(a2 > 0.0)) throw DomainError("spike " + std::to_string(s.index) + " vanishes on the design grid");
        const double a = std::sqrt(a2);
        out.alpha_sq[m] = a2;
        out.zeta[m] = member_dot(s, y) / (a * sigma);
        log_xi[m] = a * out.zeta[m] / sigma - a2 / (2.0 * sigma * sigma);
        out.xi[m] = std::exp(log_xi[m]);
    }
    out.log_z = log_mean_exp(log_xi);
    out.z = std::exp(out.log_z);
    return out;
}

LikelihoodSample z_statistic(const TestingProblem& problem, std::uint64_t seed, std::uint64_t replicate) {
    const auto set = problem.spikes();
    return likelihood_from_data(set, noise(problem.n, problem.sigma, seed, replicate), problem.sigma);
}

TestingRiskReport lr_test_risk(const TestingProblem& problem, double eta, std::size_t reps, std::uint64_t seed,
                               const ReplicateExecutor& executor) {
    if (reps < 500) throw ConfigError("likelihood-ratio risk needs at least 500 replicates");
    if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("eta must lie in (0, 1)");
    const auto set = problem.spikes();
    const std::size_t M = set.count();
    const double sigma = problem.sigma;
    const double log_threshold = std::log(1.0 - eta);

    std::vector<double> alpha(M);
    for (std::size_t m = 0; m < M; ++m) {
        alpha[m] = std::sqrt(alpha_sq(set.members[m]));
        if (!(alpha[m] > 0.0)) throw DomainError("spike vanishes on the design grid");
    }

    std::vector<unsigned char> h0_reject(reps, 0);
    std::vector<std::vector<unsigned char>> h1_accept(reps, std::vector<unsigned char>(M, 0));
    executor(reps, [&](std::size_t rep) {
        auto y = noise(problem.n, sigma, seed, rep);
        std::vector<double> log_xi(M);
        for (std::size_t k = 0; k < M; ++k) {
            const double zeta = member_dot(set.members[k], y) / (alpha[k] * sigma);
            log_xi[k] = alpha[k] * zeta / sigma - alpha[k] * alpha[k] / (2.0 * sigma * sigma);
        }
        h0_reject[rep] = log_mean_exp(log_xi) >= log_threshold;

        // Data under spike m differ from the noise only on its index range;
        // recompute the statistics of every member touching that range.
        std::vector<double> shifted = log_xi;
        for (std::size_t m = 0; m < M; ++m) {
            const auto& s = set.members[m];
            for (std::size_t i = s.first; i <= s.last; ++i) y[i - 1] += s.values[i - s.first];
            std::vector<std::size_t> touched;
            for (std::size_t k = 0; k < M; ++k) {
                const auto& o = set.members[k];
                if (o.last < s.first || o.first > s.last) continue;
                const double zeta = member_dot(o, y) / (alpha[k] * sigma);
                shifted[k] = alpha[k] * zeta / sigma - alpha[k] * alpha[k] / (2.0 * sigma * sigma);
                touched.push_back(k);
            }
            h1_accept[rep][m] = log_mean_exp(shifted) < log_threshold;
            for (std::size_t i = s.first; i <= s.last; ++i) y[i - 1] -= s.values[i - s.first];
            for (const auto k : touched) shifted[k] = log_xi[k];
        }
    });

    TestingRiskReport r;
    r.test_id = "lr";
    r.replicates = reps;
    std::size_t t1 = 0;
    std::vector<std::size_t> t2(M, 0);
    for (std::size_t rep = 0; rep < reps; ++rep) {
        t1 += h0_reject[rep];
        for (std::size_t m = 0; m < M; ++m) t2[m] += h1_accept[rep][m];
    }
    finish(r, t1, t2);
    r.worst_member = set.members[r.worst_member].index;
    return r;
}

TestingRiskReport constant_test_risk(bool reject) {
    TestingRiskReport r;
    r.test_id = reject ? "always-reject" : "never-reject";
    r.type1 = reject ? 1.0 : 0.0;
    r.worst_type2 = reject ? 0.0 : 1.0;
    r.risk = 1.0;
    r.replicates = 0;
    return r;
}

bool band_test(const ConfidenceBand& band, const wavelet::SpikeSet& spikes) {
    if (!(band.grid == UniformGrid::design(spikes.n)) || band.center.size() != spikes.n) {
        throw ShapeError("spikes are not tabulated on the band grid");
    }
    for (const auto& s : spikes.members) {
        bool inside = true;
        for (std::size_t k = 0; k < band.center.size() && inside; ++k) {
            const double v = s.value_at(k + 1);
            inside = band.lower(k) <= v && v <= band.upper(k);
        }
        if (inside) return true;
    }
    return false;
}

TestingRiskReport band_test_risk(const TestingProblem& problem, const BandBuilder& builder, std::size_t reps,
                                 std::size_t max_alternatives, std::uint64_t seed, const ReplicateExecutor& executor) {
    if (reps == 0) throw ConfigError("band test risk needs at least one replicate");
    if (builder.n() != problem.n) throw ShapeError("band builder and testing problem disagree on n");
    const auto set = problem.spikes();
    const std::size_t M = set.count();
    const std::size_t A = std::max<std::size_t>(1, std::min(M, max_alternatives));
    std::vector<std::size_t> picks(A);
    for (std::size_t a = 0; a < A; ++a) picks[a] = A == 1 ? 0 : a * (M - 1) / (A - 1);

    std::vector<unsigned char> h0_reject(reps, 0);
    std::vector<std::vector<unsigned char>> h1_accept(reps, std::vector<unsigned char>(A, 0));
    executor(reps, [&](std::size_t rep) {
        FixedDesignSample sample;
        sample.n = problem.n;
        sample.sigma = problem.sigma;
        sample.seed = seed;
        sample.replicate = rep;
        sample.y = noise(problem.n, problem.sigma, seed, rep);
        h0_reject[rep] = band_test(builder.build(sample), set);
        for (std::size_t a = 0; a < A; ++a) {
            const auto& s = set.members[picks[a]];
            auto alt = sample;
            for (std::size_t i = s.first; i <= s.last; ++i) alt.y[i - 1] += s.values[i - s.first];
            h1_accept[rep][a] = !band_test(builder.build(alt), set);
        }
    });

    TestingRiskReport r;
    r.test_id = "band";
    r.replicates = reps;
    std::size_t t1 = 0;
    std::vector<std::size_t> t2(A, 0);
    for (std::size_t rep = 0; rep < reps; ++rep) {
        t1 += h0_reject[rep];
        for (std::size_t a = 0; a < A; ++a) t2[a] += h1_accept[rep][a];
    }
    finish(r, t1, t2);
    r.worst_member = set.members[picks[r.worst_member]].index;
    return r;
}

int jstar(std::size_t n, double r) {
    if (n < 8) throw DomainError("jstar needs n >= 8");
    if (!(r > 0.0)) throw DomainError("jstar needs r > 0");
    const double nd = static_cast<double>(n);
    return static_cast<int>(std::lround(std::log2(nd / std::log(nd)) / (2.0 * r + 1.0)));
}

}  // namespace acb
