#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "funcito/catalog.hpp"
#include "funcito/config.hpp"
#include "funcito/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"funcito: a numerical laboratory for path-dependent SDEs and functional "
                 "calculus checks"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    auto* run = app.add_subcommand("run", "run all checks from an experiment config");
    run->add_option("config", config_path, "path to the experiment config (JSON)")->required();
    run->add_option("-o,--output", output_dir, "override the output directory");

    auto* catalog = app.add_subcommand("catalog", "list built-in drifts, functionals and checks");
    auto* version = app.add_subcommand("version", "print the version");

    CLI11_PARSE(app, argc, argv);

    if (catalog->parsed()) {
        std::cout << funcito::catalog_text();
        return 0;
    }
    if (version->parsed()) {
        std::cout << "funcito " << funcito::kVersion << "\n";
        return 0;
    }

    try {
        const funcito::ExperimentConfig cfg = funcito::load_config(config_path);
        const funcito::RunResult result = funcito::run_experiment(cfg, output_dir);
        for (const auto& rep : result.reports)
            std::cout << (rep.pass ? "[PASS] " : "[FAIL] ") << rep.check
                      << "  statistic=" << rep.statistic << "  budget=" << rep.budget << "\n";
        std::cout << (result.all_pass ? "all checks passed" : "some checks FAILED") << "\n";
        return result.all_pass ? 0 : 1;
    } catch (const funcito::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
