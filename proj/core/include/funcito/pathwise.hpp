#pragma once

#include <functional>
#include <vector>

#include "funcito/coefficients.hpp"
#include "funcito/noise.hpp"
#include "funcito/radon_measure.hpp"
#include "funcito/sde.hpp"

namespace funcito {

/// A path-dependent drift of convolution type: bhat(t, y) = b(t, conv(y, t)),
/// where conv integrates the history extension of y against mu. The outer
/// field b acts on states, with optional gradient and Hessian callbacks for
/// the derivative machinery.
struct ConvolutionDrift {
    std::size_t dim = 1;
    std::function<Vec(double, const Vec&)> b;                         // b(t, y)
    std::function<Matrix(double, const Vec&)> grad;                   // d_y b, N x N
    std::function<Vec(double, const Vec&, const Vec&, const Vec&)> hess;  // d2_y b.(v, w)
    RadonMeasure measure;

    double lipschitz = 1.0;   // N: outer Lipschitz/growth constant
    double grad_bound = 1.0;  // N1
    double hess_bound = 1.0;  // N2

    Vec bhat(double t, const Path& y) const { return b(t, convolve_history(y, t, measure)); }

    /// The induced SDE coefficients with constant diffusion B.
    CoefficientSet to_coefficients(const Matrix& b_matrix) const;
};

/// Everything the map psi(t, x, .) needs for one fixed omega: the start time,
/// the anchor path, the drift, and the integrated noise path W^B.
struct PsiContext {
    double start_time = 0.0;
    Path anchor;             // x
    ConvolutionDrift drift;
    Path noise_path;         // W^B for the fixed omega

    std::size_t start_node() const { return anchor.grid().aligned_index(start_time); }
};

/// psi(t, x, y) = x_{t ^ .} + int_t^{t v .} bhat(s, y) ds + (W^B_{t v .} - W^B_t),
/// with the time integral by the left-endpoint rule.
Path psi_apply(const PsiContext& ctx, const Path& y);

/// alpha(lambda) = (1 - e^{-lambda T}) / lambda * N |mu|_1: the Lipschitz
/// constant of psi(t, x, .) in the lambda-weighted norm.
double contraction_factor(double lambda, double lipschitz, double total_var, double horizon);

/// Smallest lambda (by bisection) with contraction_factor <= target.
double lambda_for_contraction(double target, double lipschitz, double total_var, double horizon);

struct PicardResult {
    Path solution;
    std::size_t iterations = 0;
    double final_error = 0.0;             // last lambda-norm update distance
    std::vector<double> lambda_errors;    // per-iteration update distances
    std::vector<double> sup_errors;
};

/// Banach iteration for the fixed point of psi(t, x, .), starting from
/// x_{t ^ .}, in the lambda-weighted norm. Requires alpha(lambda) < 1.
PicardResult picard_solve(const PsiContext& ctx, double lambda, double tol = 1e-12,
                          std::size_t max_iter = 200);

struct PathwiseOptions {
    double alpha_target = 0.5;
    double tol = 1e-12;
    std::size_t max_iter = 200;
};

struct PathwiseSolution {
    Path solution;
    double lambda = 0.0;
    double alpha = 0.0;
    std::size_t iterations = 0;
};

/// Strong solution sample of dX = bhat(t, X) dt + B dW from (t, x), for the
/// fixed omega carried by `noise`: integrates W^B and runs the Picard
/// iteration with an automatically chosen lambda.
PathwiseSolution solve_sde_pathwise(double t, const Path& x, const ConvolutionDrift& drift,
                                    const Matrix& b_matrix, const NoiseBundle& noise,
                                    const PathwiseOptions& opts = {});

}  // namespace funcito
