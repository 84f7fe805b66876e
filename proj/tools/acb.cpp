// acb: command-line driver for the Monte Carlo experiments.
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "acb/errors.hpp"
#include "acb/harness.hpp"

namespace {

constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

int run(int argc, char** argv) {
    using namespace acb::harness;
    CLI::App app{"Adaptive confidence band experiments"};
    app.set_version_flag("--version", std::string(ACB_VERSION));

    std::string experiment;
    app.add_option("experiment", experiment, "coverage | rates | lowerbound | concentration | calibrate")
        ->required()
        ->check(CLI::IsMember(experiment_names()));

    std::string config_path;
    app.add_option("--config", config_path, "flat key=value config file");

    // Flag name -> config key; flags override the config file.
    const std::pair<const char*, const char*> flags[] = {
        {"--n", "n"},         {"--sigma", "sigma"}, {"--r", "r"},     {"--s", "s"},       {"--B", "B"},
        {"--l", "l"},         {"--alpha", "alpha"}, {"--reps", "reps"}, {"--seed", "seed"}, {"--out", "out"},
        {"--format", "format"}, {"--jobs", "jobs"},
    };
    std::map<std::string, std::string> flag_values;
    std::vector<CLI::Option*> flag_options;
    for (const auto& [flag, key] : flags) {
        flag_options.push_back(app.add_option(flag, flag_values[key], std::string("overrides config key '") + key + "'"));
    }
    std::vector<std::string> sets;
    app.add_option("--set", sets, "any config key as key=value (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try {
        Settings settings;
        if (!config_path.empty()) settings = read_config_file(config_path);
        for (const auto& item : sets) {
            const auto merged = parse_config_text(item);
            if (merged.size() != 1) throw acb::ConfigError("--set expects key=value, got '" + item + "'");
            settings[merged.begin()->first] = merged.begin()->second;
        }
        std::size_t k = 0;
        for (const auto& [flag, key] : flags) {
            if (flag_options[k++]->count() > 0) settings[key] = flag_values[key];
        }
        if (const char* env = std::getenv("ACB_SEED"); env && *env) settings["seed"] = env;

        const auto config = resolve(experiment, settings);
        const auto start = std::chrono::steady_clock::now();
        const auto report = run_experiment(config, pool_executor(config.jobs));
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        for (const auto& path : write_outputs(config, report, wall)) std::cerr << "wrote " << path << '\n';
        return 0;
    } catch (const acb::ConfigError& e) {
        std::cerr << "acb: configuration error: " << e.what() << '\n';
        return exit_config;
    } catch (const acb::NumericalError& e) {
        std::cerr << "acb: numerical failure: " << e.what() << '\n';
        return exit_numerical;
    }
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "acb: " << e.what() << '\n';
        return 1;
    }
}
