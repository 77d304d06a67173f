#pragma once

#include <vector>

#include "funcito/pathwise.hpp"

namespace funcito {

/// Frozen linearization data of psi(t, x, .) at a solved fixed point: the
/// convolution of the solution and the drift gradient along it are cached
/// once, since the Neumann iteration applies the linearized map many times.
class DerivativeContext {
public:
    DerivativeContext(PsiContext ctx, Path solution, double lambda);

    const PsiContext& psi() const { return ctx_; }
    const Path& solution() const { return solution_; }
    double lambda() const { return lambda_; }
    double alpha() const { return alpha_; }
    std::size_t start_node() const { return start_node_; }

    const Matrix& grad_at(std::size_t step) const { return grad_along_[step]; }
    const Vec& conv_solution_at(std::size_t step) const { return conv_along_[step]; }

private:
    PsiContext ctx_;
    Path solution_;
    double lambda_;
    double alpha_;
    std::size_t start_node_;
    std::vector<Vec> conv_along_;     // conv(solution, t_j) per step
    std::vector<Matrix> grad_along_;  // grad b(t_j, conv_j) per step
};

/// d2 psi(t, x, y).v = v_{t ^ .}.
Path d2_psi_apply(const DerivativeContext& dctx, const Path& v);

/// d3 psi(t, x, y).v at the fixed point: the running integral of
/// grad b(r, conv(solution, r)) applied to conv(v, r).
Path d3_psi_apply(const DerivativeContext& dctx, const Path& v);

/// (I - d3 psi)^{-1} v by the geometric Neumann series, truncated once the
/// certified tail bound drops below tol.
Path neumann_apply(const DerivativeContext& dctx, const Path& v, double tol = 1e-12,
                   std::size_t max_terms = 400);

/// First derivative of the solution map x -> Lambda^{t,x} in direction v:
/// (I - d3 psi)^{-1} (v_{t ^ .}).
Path first_derivative(const DerivativeContext& dctx, const Path& v, double tol = 1e-12);

/// Second derivative: (I - d3 psi)^{-1} (d3^2 psi.(dLambda.v, dLambda.w)).
/// Requires the drift's Hessian callback.
Path second_derivative(const DerivativeContext& dctx, const Path& v, const Path& w,
                       double tol = 1e-12);

/// Convenience: solve and linearize in one go.
DerivativeContext make_derivative_context(double t, const Path& x, const ConvolutionDrift& drift,
                                          const Matrix& b_matrix, const NoiseBundle& noise,
                                          const PathwiseOptions& opts = {});

}  // namespace funcito
