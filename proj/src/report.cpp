#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <ostream>

#include "acb/errors.hpp"
#include "acb/harness.hpp"
#include "acb/text.hpp"

#ifndef ACB_VERSION
#define ACB_VERSION "0.0.0"
#endif

namespace acb::harness {

namespace {

std::string cell_text(const Cell& c) {
    struct Visitor {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(const std::string& s) const {
            if (s.find_first_of(",\"\n") == std::string::npos) return s;
            std::string q = "\"";
            for (const char ch : s) {
                if (ch == '"') q += '"';
                q += ch;
            }
            return q + "\"";
        }
        std::string operator()(double v) const { return text::format_double(v); }
        std::string operator()(long long v) const { return std::to_string(v); }
        std::string operator()(unsigned long long v) const { return std::to_string(v); }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
    };
    return std::visit(Visitor{}, c);
}

nlohmann::json cell_json(const Cell& c) {
    struct Visitor {
        nlohmann::json operator()(std::monostate) const { return nullptr; }
        nlohmann::json operator()(const std::string& s) const { return s; }
        nlohmann::json operator()(double v) const {
            if (std::isfinite(v)) return v;
            return text::format_double(v);
        }
        nlohmann::json operator()(long long v) const { return v; }
        nlohmann::json operator()(unsigned long long v) const { return v; }
        nlohmann::json operator()(bool v) const { return v; }
    };
    return std::visit(Visitor{}, c);
}

void write_table(const std::string& path, const Table& table, const std::string& format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write output file '" + path + "'");
    if (format == "json") {
        out << table_json(table).dump(1) << '\n';
    } else {
        write_csv(out, table);
    }
    if (!out) throw ConfigError("failed writing '" + path + "'");
}

std::string slopes_path(const std::string& out, const std::string& format) {
    const auto slash = out.find_last_of('/');
    const auto dot = out.find_last_of('.');
    const std::string ext = "." + format;
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
        return out.substr(0, dot) + ".slopes" + ext;
    }
    return out + ".slopes" + ext;
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

const char* const seed_rule =
    "seed_rep = derive_seed(master_seed, experiment_id, replicate) with derive_seed(m, e, k) = "
    "hash64(hash64(mix64(m) ^ fnv1a(e)), k). coverage, rates and calibrate draw replicate k from "
    "stream seed_rep at counter block 0; lowerbound and concentration use the single stream "
    "derive_seed(master_seed, experiment_id, 0) and draw replicate k from counter block k "
    "(normal variate i of replicate k sits at counter k*n + i - 1).";

void Table::add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw ShapeError("row width does not match the table header");
    rows.push_back(std::move(row));
}

void write_csv(std::ostream& out, const Table& table) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << cell_text(row[c]);
        out << '\n';
    }
}

nlohmann::json table_json(const Table& table) {
    auto rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
        nlohmann::json obj = nlohmann::json::object();
        for (std::size_t c = 0; c < row.size(); ++c) obj[table.columns[c]] = cell_json(row[c]);
        rows.push_back(std::move(obj));
    }
    return rows;
}

nlohmann::json manifest(const ExperimentConfig& config, const Report& report, double wall_seconds) {
    nlohmann::json m;
    m["tool"] = "acb";
    m["version"] = ACB_VERSION;
    m["experiment"] = config.experiment;
    m["config"] = echo(config);
    m["constants"] = report.constants;
    m["seed_rule"] = seed_rule;
    m["rows"] = report.rows.rows.size();
    if (report.slopes) m["slopes"] = table_json(*report.slopes);
    m["wall_time_seconds"] = wall_seconds;
    m["finished_utc"] = utc_now();
    return m;
}

std::vector<std::string> write_outputs(const ExperimentConfig& config, const Report& report, double wall_seconds) {
    const std::string out = config.out.empty() ? config.experiment + "." + config.format : config.out;
    std::vector<std::string> written;
    write_table(out, report.rows, config.format);
    written.push_back(out);
    if (report.slopes) {
        const auto path = slopes_path(out, config.format);
        write_table(path, *report.slopes, config.format);
        written.push_back(path);
    }
    const auto mpath = out + ".manifest.json";
    std::ofstream mf(mpath, std::ios::binary);
    if (!mf) throw ConfigError("cannot write manifest '" + mpath + "'");
    mf << manifest(config, report, wall_seconds).dump(2) << '\n';
    written.push_back(mpath);
    return written;
}

}  // namespace acb::harness
