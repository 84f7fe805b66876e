#include <fstream>
#include <functional>
#include <sstream>

#include "acb/errors.hpp"
#include "acb/harness.hpp"
#include "acb/local_poly.hpp"
#include "acb/text.hpp"
#include "acb/wavelet.hpp"

namespace acb::harness {

namespace {

template <class T>
std::string join(const std::vector<T>& v) {
    std::string out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) out += ',';
        if constexpr (std::is_floating_point_v<T>) {
            out += text::format_double(v[k]);
        } else {
            out += std::to_string(v[k]);
        }
    }
    return out;
}

std::size_t parse_size(const std::string& s, const std::string& key) {
    const long v = text::parse_long(s, key);
    if (v < 0) throw ConfigError(key + " must be nonnegative");
    return static_cast<std::size_t>(v);
}

std::uint64_t parse_seed(const std::string& s, const std::string& key) {
    const auto t = text::trim(s);
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(t, &used, 10);
    } catch (const std::exception&) {
        used = 0;
    }
    if (t.empty() || used != t.size() || t.front() == '-') throw ConfigError(key + ": not a seed: '" + s + "'");
    return v;
}

std::vector<double> parse_doubles(const std::string& s, const std::string& key) {
    std::vector<double> out;
    for (const auto& item : text::split(s, ',')) out.push_back(text::parse_double(item, key));
    return out;
}

std::vector<long> parse_longs(const std::string& s, const std::string& key) {
    std::vector<long> out;
    for (const auto& item : text::split(s, ',')) out.push_back(text::parse_long(item, key));
    return out;
}

std::vector<std::size_t> parse_sizes(const std::string& s, const std::string& key) {
    std::vector<std::size_t> out;
    for (const auto& item : text::split(s, ',')) out.push_back(parse_size(item, key));
    return out;
}

struct Field {
    std::function<void(ExperimentConfig&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

#define ACB_DOUBLE(name)                                                                          \
    {#name, {[](ExperimentConfig& c, const std::string& v) { c.name = text::parse_double(v, #name); }, \
             [](const ExperimentConfig& c) { return text::format_double(c.name); }}}
#define ACB_SIZE(name)                                                                      \
    {#name, {[](ExperimentConfig& c, const std::string& v) { c.name = parse_size(v, #name); }, \
             [](const ExperimentConfig& c) { return std::to_string(c.name); }}}
#define ACB_STRING(name)                                                               \
    {#name, {[](ExperimentConfig& c, const std::string& v) { c.name = text::trim(v); }, \
             [](const ExperimentConfig& c) { return c.name; }}}
#define ACB_BOOL(name)                                                                           \
    {#name, {[](ExperimentConfig& c, const std::string& v) { c.name = text::parse_bool(v, #name); }, \
             [](const ExperimentConfig& c) { return std::string(c.name ? "true" : "false"); }}}
#define ACB_INT(name)                                                                              \
    {#name, {[](ExperimentConfig& c, const std::string& v) {                                       \
                 c.name = static_cast<int>(text::parse_long(v, #name));                            \
             },                                                                                    \
             [](const ExperimentConfig& c) { return std::to_string(c.name); }}}

const std::map<std::string, Field>& fields() {
    static const std::map<std::string, Field> table = {
        {"n", {[](ExperimentConfig& c, const std::string& v) { c.n = parse_sizes(v, "n"); },
               [](const ExperimentConfig& c) { return join(c.n); }}},
        ACB_DOUBLE(sigma),
        ACB_DOUBLE(r),
        ACB_DOUBLE(s),
        ACB_DOUBLE(B),
        ACB_INT(l),
        ACB_STRING(kernel),
        ACB_DOUBLE(alpha),
        ACB_SIZE(reps),
        {"seed", {[](ExperimentConfig& c, const std::string& v) { c.seed = parse_seed(v, "seed"); },
                  [](const ExperimentConfig& c) { return std::to_string(c.seed); }}},
        ACB_STRING(out),
        ACB_STRING(format),
        ACB_SIZE(jobs),
        ACB_DOUBLE(rho),
        ACB_BOOL(capped),
        ACB_STRING(family),
        ACB_INT(J),
        ACB_STRING(surrogate),
        ACB_DOUBLE(L),
        ACB_DOUBLE(kappa),
        ACB_DOUBLE(lambda),
        ACB_DOUBLE(M),
        ACB_SIZE(calib_reps),
        ACB_SIZE(M_reps),
        ACB_STRING(truths),
        ACB_STRING(smooth),
        ACB_STRING(far),
        {"deltas", {[](ExperimentConfig& c, const std::string& v) { c.deltas = parse_longs(v, "deltas"); },
                    [](const ExperimentConfig& c) { return join(c.deltas); }}},
        {"eta", {[](ExperimentConfig& c, const std::string& v) { c.eta = parse_doubles(v, "eta"); },
                 [](const ExperimentConfig& c) { return join(c.eta); }}},
        ACB_STRING(test_family),
        ACB_BOOL(band_test),
        ACB_SIZE(band_reps),
        ACB_SIZE(max_alternatives),
        {"h", {[](ExperimentConfig& c, const std::string& v) { c.h = parse_doubles(v, "h"); },
               [](const ExperimentConfig& c) { return join(c.h); }}},
        {"u", {[](ExperimentConfig& c, const std::string& v) { c.u = parse_doubles(v, "u"); },
               [](const ExperimentConfig& c) { return join(c.u); }}},
        ACB_SIZE(pilot_reps),
    };
    return table;
}

#undef ACB_DOUBLE
#undef ACB_SIZE
#undef ACB_STRING
#undef ACB_BOOL
#undef ACB_INT

ExperimentConfig defaults(const std::string& experiment) {
    ExperimentConfig c;
    c.experiment = experiment;
    c.deltas = {-3, -2, -1, 0, 1, 2, 3, 4};
    c.eta = {0.5};
    c.h = {0.0625};
    if (experiment == "coverage") {
        c.n = {4096};
    } else if (experiment == "rates") {
        c.n = {512, 1024, 2048, 4096, 8192, 16384};
        c.reps = 200;
        c.truths = "ball:t=1,B=10,seed=1;ball:t=1,B=10,seed=2;ball:t=1,B=10,seed=3;ball:t=1,B=10,seed=4;"
                   "ball:t=2,B=10,seed=1;ball:t=2,B=10,seed=2;ball:t=2,B=10,seed=3;ball:t=2,B=10,seed=4";
    } else if (experiment == "lowerbound") {
        c.n = {4096};
        c.r = 1.0;
    } else if (experiment == "concentration") {
        c.n = {1024};
        c.reps = 2000;
        c.truths = "zero";
    } else if (experiment == "calibrate") {
        c.n = {4096};
        c.reps = 1000;
    } else {
        throw ConfigError("unknown experiment '" + experiment + "'");
    }
    return c;
}

}  // namespace

std::vector<std::string> experiment_names() { return {"coverage", "rates", "lowerbound", "concentration", "calibrate"}; }

Settings parse_config_text(const std::string& body) {
    Settings out;
    std::istringstream in(body);
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto t = text::trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(number) + ": expected key=value");
        const auto key = text::trim(t.substr(0, eq));
        if (key.empty()) throw ConfigError("config line " + std::to_string(number) + ": empty key");
        out[key] = text::trim(t.substr(eq + 1));
    }
    return out;
}

Settings read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream body;
    body << in.rdbuf();
    return parse_config_text(body.str());
}

ExperimentConfig resolve(const std::string& experiment, const Settings& settings) {
    auto c = defaults(experiment);
    for (const auto& [key, value] : settings) {
        if (key == "experiment") {
            if (text::trim(value) != experiment) {
                throw ConfigError("config is for experiment '" + value + "', not '" + experiment + "'");
            }
            continue;
        }
        const auto it = fields().find(key);
        if (it == fields().end()) throw ConfigError("unknown config key '" + key + "'");
        it->second.set(c, value);
    }
    c.validate();
    return c;
}

Settings echo(const ExperimentConfig& config) {
    Settings out;
    out["experiment"] = config.experiment;
    for (const auto& [key, field] : fields()) out[key] = field.get(config);
    return out;
}

void ExperimentConfig::validate() const {
    if (n.empty()) throw ConfigError("n list is empty");
    for (const auto v : n) {
        if (v < 8) throw ConfigError("every n must be at least 8");
    }
    if (!(sigma >= 0.0)) throw ConfigError("sigma must be nonnegative");
    if (!(r > 0.0 && r < s)) throw ConfigError("need 0 < r < s");
    if (!(B > 0.0)) throw ConfigError("B must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (reps < 1) throw ConfigError("reps must be at least 1");
    if (format != "csv" && format != "json") throw ConfigError("format must be csv or json");
    if (jobs < 1) throw ConfigError("jobs must be at least 1");
    if (surrogate != "upper" && surrogate != "lower") throw ConfigError("surrogate must be upper or lower");
    if (!(rho > 1.0)) throw ConfigError("rho must exceed 1");
    if (L < 0.0 || kappa < 0.0 || lambda < 0.0 || M < 0.0) throw ConfigError("constants must be nonnegative");
    for (const double e : eta) {
        if (!(e > 0.0 && e < 1.0)) throw ConfigError("eta values must lie in (0, 1)");
    }
    for (const double v : h) {
        if (!(v > 0.0 && v <= 1.0)) throw ConfigError("bandwidths must lie in (0, 1]");
    }
    LocalPolyConfig lp;
    lp.l = l;
    lp.kernel = parse_kernel(kernel);
    lp.validate();
    wavelet::build_family(family);
    wavelet::build_family(test_family);
}

}  // namespace acb::harness
