#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "funcito/path.hpp"

namespace funcito {

/// Decimal rendering with 17 significant digits (round-trip exact for
/// doubles); all CSV output goes through this.
std::string format_float(double v);

/// Header `t, x_1, ..., x_N`, one row per node.
void write_path_csv(std::ostream& os, const Path& x);
std::string path_to_csv(const Path& x);

/// Trajectory rows `trajectory_id, t, x_1..x_N`.
void write_ensemble_csv(std::ostream& os, const std::vector<Path>& trajectories);

/// Summary rows `t, mean_1.., var_1.., stderr_1..` over an ensemble.
void write_ensemble_summary_csv(std::ostream& os, const std::vector<Path>& trajectories);

void write_text_file(const std::string& file_path, const std::string& content);

}  // namespace funcito
