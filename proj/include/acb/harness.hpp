#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "acb/executor.hpp"

namespace acb::harness {

// Raw key=value settings in key order; the config file, CLI flags and the
// environment all write into one of these before it is resolved.
using Settings = std::map<std::string, std::string>;

// Flat "key = value" lines; '#' starts a comment. Throws ConfigError on
// unreadable files or malformed lines.
Settings read_config_file(const std::string& path);
Settings parse_config_text(const std::string& text);

struct ExperimentConfig {
    std::string experiment;  // coverage | rates | lowerbound | concentration | calibrate
    std::vector<std::size_t> n;
    double sigma = 1.0;
    double r = 0.75;
    double s = 2.0;
    double B = 10.0;
    int l = 2;
    std::string kernel = "epanechnikov";
    double alpha = 0.05;
    std::size_t reps = 500;
    std::uint64_t seed = 42;
    std::string out;
    std::string format = "csv";
    std::size_t jobs = 1;

    // Lepski grid and band distance surrogate.
    double rho = 2.0;
    bool capped = true;
    std::string family = "db3";
    int J = 0;
    std::string surrogate = "upper";

    // Constants; zero means "calibrate".
    double L = 0.0;
    double kappa = 0.0;
    double lambda = 0.0;
    double M = 0.0;
    std::size_t calib_reps = 1000;
    std::size_t M_reps = 500;

    // Truth panels (';'-separated ids). Empty picks the experiment default.
    std::string truths;
    std::string smooth;
    std::string far;

    // Lower-bound sweep.
    std::vector<long> deltas;
    std::vector<double> eta;
    std::string test_family = "haar";
    bool band_test = false;
    std::size_t band_reps = 100;
    std::size_t max_alternatives = 8;

    // Concentration sweep.
    std::vector<double> h;
    std::vector<double> u;  // empty: default sweep per (n, h)
    std::size_t pilot_reps = 500;

    void validate() const;
};

std::vector<std::string> experiment_names();

// Defaults for `experiment`, overlaid with `settings`. Unknown keys and
// malformed values throw ConfigError.
ExperimentConfig resolve(const std::string& experiment, const Settings& settings);

// Every resolved field as text; resolve(experiment, echo(c)) reproduces c.
Settings echo(const ExperimentConfig& config);

// Worker pool over replicate indices. jobs <= 1 runs inline. The first
// exception thrown by a body is rethrown after all workers stop.
ReplicateExecutor pool_executor(std::size_t jobs);

using Cell = std::variant<std::monostate, std::string, double, long long, unsigned long long, bool>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
};

// Header row, ',' separators, '.' decimals, LF endings; empty cells for
// missing values.
void write_csv(std::ostream& out, const Table& table);
nlohmann::json table_json(const Table& table);

struct Report {
    Table rows;
    std::optional<Table> slopes;  // rates only
    nlohmann::json constants = nlohmann::json::array();
};

Report run_coverage(const ExperimentConfig& config, const ReplicateExecutor& executor);
Report run_rates(const ExperimentConfig& config, const ReplicateExecutor& executor);
Report run_lowerbound(const ExperimentConfig& config, const ReplicateExecutor& executor);
Report run_concentration(const ExperimentConfig& config, const ReplicateExecutor& executor);
Report run_calibrate(const ExperimentConfig& config, const ReplicateExecutor& executor);
Report run_experiment(const ExperimentConfig& config, const ReplicateExecutor& executor);

extern const char* const seed_rule;

nlohmann::json manifest(const ExperimentConfig& config, const Report& report, double wall_seconds);

// Writes config.out in the configured format, "<stem>.slopes.<ext>" when
// present and "<out>.manifest.json". Throws ConfigError if a file cannot be
// written. Returns the paths written.
std::vector<std::string> write_outputs(const ExperimentConfig& config, const Report& report, double wall_seconds);

}  // namespace acb::harness
