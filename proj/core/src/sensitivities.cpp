#include "funcito/sensitivities.hpp"

#include <cmath>
#include <string>

namespace funcito {

DerivativeContext::DerivativeContext(PsiContext ctx, Path solution, double lambda)
    : ctx_(std::move(ctx)), solution_(std::move(solution)), lambda_(lambda) {
    const TimeGrid& grid = solution_.grid();
    alpha_ = contraction_factor(lambda_, ctx_.drift.lipschitz,
                                total_variation(ctx_.drift.measure), grid.horizon());
    if (!(alpha_ < 1.0))
        throw std::invalid_argument("DerivativeContext: contraction factor >= 1");
    if (!ctx_.drift.grad)
        throw std::invalid_argument("DerivativeContext: drift gradient callback required");
    start_node_ = ctx_.start_node();
    conv_along_.reserve(grid.n_steps());
    grad_along_.reserve(grid.n_steps());
    for (std::size_t j = 0; j < grid.n_steps(); ++j) {
        conv_along_.push_back(convolve_history(solution_, grid.node(j), ctx_.drift.measure));
        grad_along_.push_back(ctx_.drift.grad(grid.node(j), conv_along_.back()));
    }
}

Path d2_psi_apply(const DerivativeContext& dctx, const Path& v) {
    return v.stopped_at_node(dctx.start_node());
}

Path d3_psi_apply(const DerivativeContext& dctx, const Path& v) {
    const TimeGrid& grid = dctx.solution().grid();
    const std::size_t dim = dctx.solution().dim();
    if (!(v.grid() == grid) || v.dim() != dim)
        throw std::invalid_argument("d3_psi_apply: direction must live on the context grid");
    const std::size_t k0 = dctx.start_node();
    const double dt = grid.dt();

    std::vector<double> vals(grid.n_nodes() * dim, 0.0);
    Vec acc(dim, 0.0);
    for (std::size_t k = k0 + 1; k < grid.n_nodes(); ++k) {
        const std::size_t j = k - 1;
        const Vec conv_v = convolve_history(v, grid.node(j), dctx.psi().drift.measure);
        const Vec push = dctx.grad_at(j).apply(conv_v);
        axpy(dt, push, acc);
        std::copy(acc.begin(), acc.end(), vals.begin() + k * dim);
    }
    return Path(grid, dim, std::move(vals), v.kind());
}

Path neumann_apply(const DerivativeContext& dctx, const Path& v, double tol,
                   std::size_t max_terms) {
    const double alpha = dctx.alpha();
    const double lambda = dctx.lambda();
    const double v_norm = weighted_norm(v, lambda);
    Path sum = v;
    Path term = v;
    double apriori = v_norm;  // alpha^k |v|_lambda after k applications
    for (std::size_t k = 0; k < max_terms; ++k) {
        const double term_norm = weighted_norm(term, lambda);
        const double tail_bound = alpha * std::min(term_norm, apriori) / (1.0 - alpha);
        if (tail_bound <= tol) return sum;
        term = d3_psi_apply(dctx, term);
        sum = sum.add_scaled(term, 1.0);
        apriori *= alpha;
    }
    throw SolveError("neumann_apply: series not converged in " + std::to_string(max_terms) +
                     " terms (alpha=" + std::to_string(alpha) + ")");
}

Path first_derivative(const DerivativeContext& dctx, const Path& v, double tol) {
    return neumann_apply(dctx, d2_psi_apply(dctx, v), tol);
}

Path second_derivative(const DerivativeContext& dctx, const Path& v, const Path& w, double tol) {
    if (!dctx.psi().drift.hess)
        throw std::invalid_argument("second_derivative: drift Hessian callback required");
    const Path dv = first_derivative(dctx, v, tol);
    const Path dw = first_derivative(dctx, w, tol);

    const TimeGrid& grid = dctx.solution().grid();
    const std::size_t dim = dctx.solution().dim();
    const std::size_t k0 = dctx.start_node();
    const double dt = grid.dt();
    const RadonMeasure& mu = dctx.psi().drift.measure;

    std::vector<double> vals(grid.n_nodes() * dim, 0.0);
    Vec acc(dim, 0.0);
    for (std::size_t k = k0 + 1; k < grid.n_nodes(); ++k) {
        const std::size_t j = k - 1;
        const double tj = grid.node(j);
        const Vec conv_p = convolve_history(dv, tj, mu);
        const Vec conv_q = convolve_history(dw, tj, mu);
        const Vec push = dctx.psi().drift.hess(tj, dctx.conv_solution_at(j), conv_p, conv_q);
        axpy(dt, push, acc);
        std::copy(acc.begin(), acc.end(), vals.begin() + k * dim);
    }
    Path rhs(grid, dim, std::move(vals), PathKind::ContinuousSample);
    return neumann_apply(dctx, rhs, tol);
}

DerivativeContext make_derivative_context(double t, const Path& x, const ConvolutionDrift& drift,
                                          const Matrix& b_matrix, const NoiseBundle& noise,
                                          const PathwiseOptions& opts) {
    PathwiseSolution sol = solve_sde_pathwise(t, x, drift, b_matrix, noise, opts);
    PsiContext ctx{t, x, drift, integrate_constant_noise(b_matrix, noise)};
    return DerivativeContext(std::move(ctx), std::move(sol.solution), sol.lambda);
}

}  // namespace funcito
