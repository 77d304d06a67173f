#include "funcito/checks.hpp"

#include <algorithm>
#include <cmath>

#include "funcito/rng.hpp"

namespace funcito {

namespace {

Path random_step_path(const TimeGrid& grid, std::size_t dim, std::uint64_t seed,
                      std::uint64_t stream) {
    const CounterRng rng(seed, stream);
    std::vector<double> vals(grid.n_nodes() * dim);
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = rng.normal(i);
    return Path(grid, dim, std::move(vals), PathKind::Step);
}

}  // namespace

ContractionProbe probe_contraction(const ConvolutionDrift& drift, const Path& anchor,
                                   const Path& noise_path, double t, double lambda,
                                   std::size_t n_pairs, std::uint64_t seed) {
    const TimeGrid& grid = anchor.grid();
    ContractionProbe probe;
    probe.lambda = lambda;
    probe.bound = contraction_factor(lambda, drift.lipschitz, total_variation(drift.measure),
                                     grid.horizon());

    PsiContext ctx{t, anchor, drift, noise_path};
    for (std::size_t p = 0; p < n_pairs; ++p) {
        const Path y = random_step_path(grid, anchor.dim(), seed, 2 * p);
        const Path yp = random_step_path(grid, anchor.dim(), seed, 2 * p + 1);
        const double denom = weighted_norm_diff(y, yp, lambda);
        if (denom == 0.0) continue;
        const double num = weighted_norm_diff(psi_apply(ctx, y), psi_apply(ctx, yp), lambda);
        probe.max_ratio = std::max(probe.max_ratio, num / denom);
    }

    const PicardResult pr = picard_solve(ctx, lambda, 1e-12, 400);
    probe.picard_iterations = pr.iterations;
    for (std::size_t i = 0; i + 1 < pr.lambda_errors.size(); ++i) {
        // Skip ratios once the update sits at the rounding floor.
        if (pr.lambda_errors[i + 1] < 1e-14) break;
        probe.max_picard_ratio =
            std::max(probe.max_picard_ratio, pr.lambda_errors[i + 1] / pr.lambda_errors[i]);
    }
    return probe;
}

SensitivityComparison compare_sensitivities(double t, const Path& x,
                                            const ConvolutionDrift& drift,
                                            const Matrix& b_matrix, const NoiseBundle& noise,
                                            double fd_eps) {
    const TimeGrid& grid = x.grid();
    const std::size_t dim = x.dim();
    SensitivityComparison out;

    const Path wb = integrate_constant_noise(b_matrix, noise);
    PsiContext ctx{t, x, drift, wb};
    const double lambda = lambda_for_contraction(0.5, drift.lipschitz,
                                                 total_variation(drift.measure), grid.horizon());
    out.diagnostics = picard_solve(ctx, lambda);
    DerivativeContext dctx(ctx, out.diagnostics.solution, lambda);

    const double eps = fd_eps > 0.0 ? fd_eps : 1e-4 * (1.0 + x.sup_norm());
    const auto solve_from = [&](const Path& x0) {
        PsiContext c{t, x0, drift, wb};
        return picard_solve(c, lambda).solution;
    };
    const auto rel_gap = [](const Path& a, const Path& b) {
        const double scale = std::max(1.0, b.sup_norm());
        return sup_norm_diff(a, b) / scale;
    };

    // Direction 0: a smooth direction; direction 1: a vertical bump at t.
    std::vector<Path> directions;
    directions.push_back(Path::constant(grid, Vec(dim, 1.0)));
    directions.push_back(bump_direction(t, Vec(dim, 1.0), grid));

    for (std::size_t d = 0; d < directions.size(); ++d) {
        const Path& v = directions[d];
        const Path dv = first_derivative(dctx, v);
        const Path up = solve_from(x.add_scaled(v, eps));
        const Path dn = solve_from(x.add_scaled(v, -eps));
        const Path fd = up.add_scaled(dn, -1.0);
        Path fd_scaled = Path::zero(grid, dim);
        fd_scaled = fd_scaled.add_scaled(fd, 1.0 / (2.0 * eps));
        out.first_order_rel = std::max(out.first_order_rel, rel_gap(dv, fd_scaled));
        for (std::size_t k = 0; k < grid.n_nodes(); ++k) {
            SensitivityRow row;
            row.direction_id = d;
            row.t = grid.node(k);
            row.node = k;
            row.neumann_value = dv.node(k)[0];
            row.fd_value = fd_scaled.node(k)[0];
            const double scale = std::max(1.0, std::abs(row.fd_value));
            row.rel_err = std::abs(row.neumann_value - row.fd_value) / scale;
            out.rows.push_back(row);
        }
    }

    // Second derivative against the 4-point stencil, coupled noise.
    {
        const Path& v = directions[0];
        const Path& w = directions[1];
        const Path d2 = second_derivative(dctx, v, w);
        const Path pp = solve_from(x.add_scaled(v, eps).add_scaled(w, eps));
        const Path pm = solve_from(x.add_scaled(v, eps).add_scaled(w, -eps));
        const Path mp = solve_from(x.add_scaled(v, -eps).add_scaled(w, eps));
        const Path mm = solve_from(x.add_scaled(v, -eps).add_scaled(w, -eps));
        Path stencil = Path::zero(grid, dim);
        stencil = stencil.add_scaled(pp, 1.0).add_scaled(pm, -1.0).add_scaled(mp, -1.0)
                      .add_scaled(mm, 1.0);
        Path stencil_scaled = Path::zero(grid, dim);
        stencil_scaled = stencil_scaled.add_scaled(stencil, 1.0 / (4.0 * eps * eps));
        out.second_order_rel = rel_gap(d2, stencil_scaled);
    }

    // Dense oracle for the scalar case: assemble the discretized linear
    // operator column by column and solve (I - A) z = v_{t ^ .} directly.
    if (dim == 1) {
        const std::size_t n = grid.n_nodes();
        Matrix system(n, n);
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<double> unit(n, 0.0);
            unit[j] = 1.0;
            const Path ej(grid, 1, std::move(unit), PathKind::Step);
            const Path col = d3_psi_apply(dctx, ej);
            for (std::size_t i = 0; i < n; ++i) system(i, j) = (i == j ? 1.0 : 0.0) - col.node(i)[0];
        }
        const Path& v = directions[0];
        const Path rhs = d2_psi_apply(dctx, v);
        Vec b(n);
        for (std::size_t i = 0; i < n; ++i) b[i] = rhs.node(i)[0];
        const Vec z = solve_dense(system, b);
        const Path neumann = first_derivative(dctx, v, 1e-13);
        double gap = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            gap = std::max(gap, std::abs(z[i] - neumann.node(i)[0]));
        out.dense_rel = gap / std::max(1.0, neumann.sup_norm());
        out.dense_checked = true;
    }
    return out;
}

}  // namespace funcito
