#include "funcito/pathwise.hpp"

#include <cmath>
#include <string>

namespace funcito {

CoefficientSet ConvolutionDrift::to_coefficients(const Matrix& b_matrix) const {
    if (b_matrix.rows != dim)
        throw std::invalid_argument("ConvolutionDrift: B rows must match the drift dimension");
    CoefficientSet c;
    c.dim_h = dim;
    c.dim_u = b_matrix.cols;
    c.drift = [d = *this](double t, const Path& x) { return d.bhat(t, x); };
    c.diffusion = [b_matrix](double, const Path&) { return b_matrix; };
    c.drift_lipschitz = lipschitz;
    c.grad_bound = grad_bound;
    c.hess_bound = hess_bound;
    c.growth_lipschitz = lipschitz * total_variation(measure);
    return c;
}

Path psi_apply(const PsiContext& ctx, const Path& y) {
    const TimeGrid& grid = ctx.anchor.grid();
    const std::size_t dim = ctx.anchor.dim();
    if (!(y.grid() == grid) || y.dim() != dim)
        throw std::invalid_argument("psi_apply: y must live on the context grid");
    const std::size_t k0 = ctx.start_node();
    const double dt = grid.dt();

    std::vector<double> vals = ctx.anchor.stopped_at_node(k0).dense_values();
    const auto wb0 = ctx.noise_path.node(k0);

    Vec acc(dim, 0.0);  // running left-rule integral of bhat(., y)
    for (std::size_t k = k0 + 1; k < grid.n_nodes(); ++k) {
        const Vec b = ctx.drift.bhat(grid.node(k - 1), y);
        if (!all_finite(b))
            throw SolveError("psi_apply: drift evaluation diverged at t=" +
                             std::to_string(grid.node(k - 1)));
        axpy(dt, b, acc);
        const auto wb = ctx.noise_path.node(k);
        for (std::size_t i = 0; i < dim; ++i)
            vals[k * dim + i] += acc[i] + (wb[i] - wb0[i]);
    }
    return Path(grid, dim, std::move(vals), ctx.anchor.kind());
}

double contraction_factor(double lambda, double lipschitz, double total_var, double horizon) {
    if (!(lambda > 0.0)) throw std::invalid_argument("contraction_factor: lambda must be > 0");
    return (1.0 - std::exp(-lambda * horizon)) / lambda * lipschitz * total_var;
}

double lambda_for_contraction(double target, double lipschitz, double total_var, double horizon) {
    if (!(target > 0.0) || !(target < 1.0))
        throw std::invalid_argument("lambda_for_contraction: target must be in (0,1)");
    double lo = 1e-9;
    if (contraction_factor(lo, lipschitz, total_var, horizon) <= target) return lo;
    double hi = 1.0;
    while (contraction_factor(hi, lipschitz, total_var, horizon) > target) {
        hi *= 2.0;
        if (hi > 1e12)
            throw SolveError("lambda_for_contraction: no usable lambda below 1e12");
    }
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (contraction_factor(mid, lipschitz, total_var, horizon) > target)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

PicardResult picard_solve(const PsiContext& ctx, double lambda, double tol,
                          std::size_t max_iter) {
    if (!(tol > 0.0)) throw std::invalid_argument("picard_solve: tol must be > 0");
    const double alpha = contraction_factor(lambda, ctx.drift.lipschitz,
                                            total_variation(ctx.drift.measure),
                                            ctx.anchor.grid().horizon());
    if (!(alpha < 1.0))
        throw std::invalid_argument("picard_solve: contraction factor " + std::to_string(alpha) +
                                    " >= 1; increase lambda");

    PicardResult res;
    Path y = ctx.anchor.stopped_at_node(ctx.start_node());
    for (std::size_t it = 0; it < max_iter; ++it) {
        Path z = psi_apply(ctx, y);
        const double err = weighted_norm_diff(z, y, lambda);
        res.lambda_errors.push_back(err);
        res.sup_errors.push_back(sup_norm_diff(z, y));
        y = std::move(z);
        res.iterations = it + 1;
        res.final_error = err;
        if (err <= tol) {
            res.solution = std::move(y);
            return res;
        }
    }
    std::string trace;
    for (double e : res.lambda_errors) trace += " " + std::to_string(e);
    throw SolveError("picard_solve: no convergence in " + std::to_string(max_iter) +
                     " iterations; lambda-error trace:" + trace);
}

PathwiseSolution solve_sde_pathwise(double t, const Path& x, const ConvolutionDrift& drift,
                                    const Matrix& b_matrix, const NoiseBundle& noise,
                                    const PathwiseOptions& opts) {
    PsiContext ctx{t, x, drift, integrate_constant_noise(b_matrix, noise)};
    const double tv = total_variation(drift.measure);
    const double lambda =
        lambda_for_contraction(opts.alpha_target, drift.lipschitz, tv, x.grid().horizon());
    PicardResult pr = picard_solve(ctx, lambda, opts.tol, opts.max_iter);
    PathwiseSolution out;
    out.solution = std::move(pr.solution);
    out.lambda = lambda;
    out.alpha = contraction_factor(lambda, drift.lipschitz, tv, x.grid().horizon());
    out.iterations = pr.iterations;
    return out;
}

}  // namespace funcito
