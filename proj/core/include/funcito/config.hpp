#pragma once

#include <string>
#include <vector>

#include "funcito/catalog.hpp"
#include "funcito/coefficients.hpp"
#include "funcito/verification.hpp"

namespace funcito {

/// A fully validated experiment: model (grid, drift, measure, diffusion,
/// initial path), one functional, and a list of checks to run.
struct ExperimentConfig {
    std::uint64_t seed = 0;
    TimeGrid grid;
    std::size_t dim_h = 1;
    std::size_t dim_u = 1;
    ConvolutionDrift drift;
    Matrix diffusion_b;
    Path initial;
    std::string functional_name;
    Json functional_params;
    std::vector<std::pair<std::string, Json>> checks;
    std::string output_directory = "out";
};

/// Thrown on invalid configuration; the message carries the config path, a
/// line anchor when the parser provides one, and the offending entry.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);
ExperimentConfig load_config(const std::string& file_path);

struct RunResult {
    bool all_pass = false;
    std::vector<ResidualReport> reports;
    std::vector<std::string> files_written;
};

/// Executes every configured check and writes summary.csv, verdicts.json and
/// the per-check CSVs into the output directory. Same config + same seed
/// produce byte-identical files.
RunResult run_experiment(const ExperimentConfig& config,
                         const std::string& output_dir_override = "");

}  // namespace funcito
