#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "funcito/pathwise.hpp"
#include "funcito/sensitivities.hpp"
#include "funcito/verification.hpp"

namespace funcito {

/// Empirical check of the contraction inequality for psi(t, x, .): measured
/// lambda-norm ratios over random step-path pairs against the closed-form
/// bound, plus the decay ratios of an actual Picard run.
struct ContractionProbe {
    double lambda = 0.0;
    double bound = 0.0;            // alpha(lambda)
    double max_ratio = 0.0;        // sup over pairs of |psi(y)-psi(y')| / |y-y'|
    double max_picard_ratio = 0.0; // sup of consecutive Picard error ratios
    std::size_t picard_iterations = 0;
};

ContractionProbe probe_contraction(const ConvolutionDrift& drift, const Path& anchor,
                                   const Path& noise_path, double t, double lambda,
                                   std::size_t n_pairs, std::uint64_t seed);

/// One row of the sensitivity report CSV.
struct SensitivityRow {
    std::size_t direction_id = 0;
    double t = 0.0;
    std::size_t node = 0;
    double neumann_value = 0.0;
    double fd_value = 0.0;
    double rel_err = 0.0;
};

struct SensitivityComparison {
    double first_order_rel = 0.0;   // Neumann vs coupled central FD
    double second_order_rel = 0.0;  // vs 4-point stencil
    double dense_rel = 0.0;         // vs dense linear solve (scalar case only)
    bool dense_checked = false;
    std::vector<SensitivityRow> rows;
    PicardResult diagnostics;       // the base solve, for the diagnostics CSV
};

/// Compares the Neumann-series derivatives of the solution map against
/// coupled-noise finite differences (same W^B on both sides) and, in the
/// scalar case, against a dense solve of the discretized linear system.
SensitivityComparison compare_sensitivities(double t, const Path& x,
                                            const ConvolutionDrift& drift,
                                            const Matrix& b_matrix, const NoiseBundle& noise,
                                            double fd_eps = 0.0);

}  // namespace funcito
