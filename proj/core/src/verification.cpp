#include "funcito/verification.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "funcito/parallel.hpp"
#include "funcito/rng.hpp"
#include "funcito/sensitivities.hpp"

namespace funcito {

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    return splitmix64(seed ^ splitmix64(salt + 0xA5A5A5A55A5A5A5AULL));
}

struct MeanStd {
    double mean = 0.0;
    double std_error = 0.0;
    double sample_std = 0.0;
};

MeanStd reduce_ordered(const std::vector<double>& vals) {
    MeanStd ms;
    const double n = static_cast<double>(vals.size());
    double acc = 0.0;
    for (double v : vals) acc += v;
    ms.mean = acc / n;
    double ss = 0.0;
    for (double v : vals) ss += (v - ms.mean) * (v - ms.mean);
    ms.sample_std = n > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    ms.std_error = ms.sample_std / std::sqrt(n);
    return ms;
}

}  // namespace

TrajectorySolver make_euler_solver(const CoefficientSet& coeffs) {
    return [coeffs](double t, const Path& x, const NoiseBundle& noise) {
        ItoProcessSpec spec;
        spec.start_time = t;
        spec.initial = x;
        return euler_maruyama(spec, coeffs, noise);
    };
}

TrajectorySolver make_pathwise_solver(const ConvolutionDrift& drift, const Matrix& b_matrix) {
    return [drift, b_matrix](double t, const Path& x, const NoiseBundle& noise) {
        return solve_sde_pathwise(t, x, drift, b_matrix, noise).solution;
    };
}

MCEstimate feynman_kac_with(const TrajectorySolver& solver, std::size_t dim_u, double t,
                            const Path& x, const Functional& f, std::size_t n_paths,
                            std::uint64_t seed) {
    if (n_paths == 0) throw std::invalid_argument("feynman_kac: n_paths must be >= 1");
    const TimeGrid& grid = x.grid();
    std::vector<double> vals(n_paths, 0.0);
    parallel_for(n_paths, [&](std::size_t i) {
        try {
            const NoiseBundle noise = sample_noise(grid, dim_u, seed, i);
            const Path traj = solver(t, x, noise);
            vals[i] = f.value(grid.horizon(), traj);
        } catch (const SolveError& e) {
            throw SolveError("trajectory " + std::to_string(i) + ": " + e.what());
        }
    });
    const MeanStd ms = reduce_ordered(vals);
    MCEstimate est;
    est.value = ms.mean;
    est.std_error = ms.std_error;
    est.n_paths = n_paths;
    est.seed = seed;
    return est;
}

MCEstimate feynman_kac(double t, const Path& x, const Functional& f,
                       const CoefficientSet& coeffs, std::size_t n_paths, std::uint64_t seed) {
    return feynman_kac_with(make_euler_solver(coeffs), coeffs.dim_u, t, x, f, n_paths, seed);
}

Functional make_mc_value_functional(const TrajectorySolver& solver, std::size_t dim_u,
                                    const Functional& f, std::size_t n_paths,
                                    std::uint64_t seed) {
    Functional phi;
    phi.name = "mc_phi(" + f.name + ")";
    phi.grid_times_only = true;
    phi.value = [solver, dim_u, f, n_paths, seed](double t, const Path& x) {
        return feynman_kac_with(solver, dim_u, t, x, f, n_paths, seed).value;
    };
    return phi;
}

ResidualReport tower_residual(double t_prime, double t, const Path& x, const Functional& f,
                              const CoefficientSet& coeffs, std::size_t n_outer,
                              std::size_t n_inner, std::uint64_t seed) {
    if (t_prime > t) throw std::invalid_argument("tower_residual: requires t' <= t");
    const TimeGrid& grid = x.grid();

    const MCEstimate direct =
        feynman_kac(t_prime, x, f, coeffs, n_outer * n_inner, derive_seed(seed, 0));

    std::vector<double> outer_vals(n_outer, 0.0);
    parallel_for(n_outer, [&](std::size_t j) {
        const NoiseBundle noise = sample_noise(grid, coeffs.dim_u, derive_seed(seed, 1), j);
        ItoProcessSpec spec;
        spec.start_time = t_prime;
        spec.initial = x;
        const Path xj = euler_maruyama(spec, coeffs, noise);
        outer_vals[j] = feynman_kac(t, xj, f, coeffs, n_inner, derive_seed(seed, 2 + j)).value;
    });
    const MeanStd nested = reduce_ordered(outer_vals);

    ResidualReport rep;
    rep.check = "tower_identity";
    rep.statistic = std::abs(direct.value - nested.mean);
    const double combined =
        std::sqrt(direct.std_error * direct.std_error + nested.std_error * nested.std_error);
    rep.budget = 3.0 * combined;
    rep.pass = rep.statistic <= rep.budget;
    rep.max_abs = rep.rms = rep.statistic;
    rep.detail("direct", direct.value);
    rep.detail("nested", nested.mean);
    rep.detail("direct_stderr", direct.std_error);
    rep.detail("nested_stderr", nested.std_error);
    return rep;
}

ResidualReport ito_residual(const Functional& u, double t_hat, const Path& y_hat,
                            const CoefficientSet& coeffs, const NoiseBundle& noise,
                            const ItoOptions& opts) {
    const TimeGrid& grid = y_hat.grid();
    const std::size_t k0 = grid.aligned_index(t_hat);
    const BasisSpec basis(coeffs.dim_h, coeffs.dim_u);

    ItoProcessSpec spec;
    spec.start_time = t_hat;
    spec.initial = y_hat;
    const Path x = euler_maruyama(spec, coeffs, noise);
    const RealizedCoefficients rc = realized_coefficients(x, coeffs);

    ResidualReport rep;
    rep.check = "ito_formula";
    rep.per_node.assign(grid.n_nodes(), 0.0);

    double rhs = u.value(t_hat, x.stopped_at_node(k0));
    const double dt = grid.dt();
    double max_abs = 0.0, sum_sq = 0.0;
    for (std::size_t k = k0; k < grid.n_nodes(); ++k) {
        const double lhs = u.value(grid.node(k), x.stopped_at_node(k));
        const double r = lhs - rhs;
        rep.per_node[k] = r;
        max_abs = std::max(max_abs, std::abs(r));
        sum_sq += r * r;
        if (k == grid.n_steps()) break;

        const Path xs = x.stopped_at_node(k);
        const double tk = grid.node(k);
        // Space terms at the left endpoint (predictable integrands), the time
        // quotient at the right endpoint: with h = dt it is exactly the
        // discrete time increment, so the sum telescopes for functionals the
        // grid represents exactly.
        const double tnext = grid.node(k + 1);
        const double time_term =
            left_time_derivative(u, tnext, x.stopped_at_node(k + 1), opts.time);
        const double drift_term = vertical_derivative(u, tk, xs, rc.drift[k], opts.space);
        const double trace = trace_term(u, tk, xs, rc.diffusion[k], basis, opts.space);
        const Vec phi_dw = rc.diffusion[k].apply(noise.step(k));
        const double ito_term = vertical_derivative(u, tk, xs, phi_dw, opts.space);
        rhs += (time_term + drift_term + 0.5 * trace) * dt + ito_term;
    }
    const double n_terms = static_cast<double>(grid.n_nodes() - k0);
    rep.max_abs = max_abs;
    rep.rms = std::sqrt(sum_sq / n_terms);
    rep.statistic = std::abs(rep.per_node[grid.n_steps()]);
    rep.detail("terminal", rep.per_node[grid.n_steps()]);
    return rep;
}

double kolmogorov_pointwise(const Functional& phi, const CoefficientSet& coeffs, double t,
                            const Path& x, const FDScheme& scheme) {
    return left_time_derivative(phi, t, x, scheme) + generator(phi, t, x, coeffs, scheme);
}

ResidualReport kolmogorov_residual_analytic(const Functional& phi, const CoefficientSet& coeffs,
                                            double t, const Path& x, double tol) {
    ResidualReport rep;
    rep.check = "kolmogorov_analytic";
    rep.statistic = std::abs(kolmogorov_pointwise(phi, coeffs, t, x, FDScheme{}));
    rep.budget = tol;
    rep.pass = rep.statistic <= tol;
    rep.max_abs = rep.rms = rep.statistic;
    return rep;
}

ResidualReport kolmogorov_residual(const Functional& f, const CoefficientSet& coeffs, double t,
                                   const Path& x, const KolmogorovOptions& opts,
                                   const TrajectorySolver* solver, std::size_t dim_u_override) {
    const TrajectorySolver fallback = make_euler_solver(coeffs);
    const TrajectorySolver& use = solver ? *solver : fallback;
    const std::size_t dim_u = dim_u_override ? dim_u_override : coeffs.dim_u;

    std::vector<double> residuals(opts.replicas, 0.0);
    for (std::size_t r = 0; r < opts.replicas; ++r) {
        const Functional phi = make_mc_value_functional(use, dim_u, f, opts.n_paths,
                                                        derive_seed(opts.seed, 100 + r));
        residuals[r] = kolmogorov_pointwise(phi, coeffs, t, x, opts.fd);
    }
    const MeanStd ms = reduce_ordered(residuals);

    ResidualReport rep;
    rep.check = "kolmogorov";
    rep.statistic = std::abs(ms.mean);
    double dt_term = 0.0;
    if (opts.dt_budget_term && x.grid().n_steps() % 2 == 0 && x.grid().n_steps() >= 8) {
        const TimeGrid coarse(x.grid().horizon(), x.grid().n_steps() / 2);
        if (coarse.is_aligned(t)) {
            const Path xc = x.sampled_on(coarse);
            const Functional phi_c = make_mc_value_functional(use, dim_u, f, opts.n_paths,
                                                              derive_seed(opts.seed, 100));
            const double rc = kolmogorov_pointwise(phi_c, coeffs, t, xc, opts.fd);
            dt_term = std::abs(residuals[0] - rc);
            rep.detail("coarse_residual", rc);
        }
    }
    rep.budget = 3.0 * ms.std_error + dt_term;
    rep.pass = rep.statistic <= rep.budget;
    rep.max_abs = rep.rms = rep.statistic;
    rep.detail("replica_stderr", ms.std_error);
    rep.detail("dt_budget_term", dt_term);
    return rep;
}

ClarkOconeResult clark_ocone_residual(const Functional& phi, const CoefficientSet& coeffs,
                                      double t_hat, const Path& y_hat,
                                      const ClarkOconeOptions& opts) {
    const TimeGrid& grid = y_hat.grid();
    const std::size_t k0 = grid.aligned_index(t_hat);
    const std::size_t nodes = grid.n_nodes();

    const double phi0 = phi.value(t_hat, y_hat.stopped_at_node(k0));

    std::vector<double> r_all(opts.n_paths * nodes, 0.0);
    parallel_for(opts.n_paths, [&](std::size_t i) {
        const NoiseBundle noise = sample_noise(grid, coeffs.dim_u, opts.seed, i);
        ItoProcessSpec spec;
        spec.start_time = t_hat;
        spec.initial = y_hat;
        const Path x = euler_maruyama(spec, coeffs, noise);
        double integral = 0.0;
        for (std::size_t k = k0; k < nodes; ++k) {
            const Path xs = x.stopped_at_node(k);
            const double tk = grid.node(k);
            const bool want_value = !opts.terminal_only || k == grid.n_steps();
            if (want_value) r_all[i * nodes + k] = phi.value(tk, xs) - phi0 - integral;
            if (k == grid.n_steps()) break;
            const Matrix phik = coeffs.diffusion(tk, xs);
            const Vec phi_dw = phik.apply(noise.step(k));
            integral += vertical_derivative(phi, tk, xs, phi_dw, opts.fd);
        }
    });

    ClarkOconeResult out;
    out.mean_per_node.assign(nodes, 0.0);
    double worst_sigma = 0.0;
    std::vector<double> column(opts.n_paths);
    if (!opts.terminal_only) {
        for (std::size_t k = k0; k < nodes; ++k) {
            for (std::size_t i = 0; i < opts.n_paths; ++i) column[i] = r_all[i * nodes + k];
            const MeanStd ms = reduce_ordered(column);
            out.mean_per_node[k] = ms.mean;
            if (ms.std_error > 0.0)
                worst_sigma = std::max(worst_sigma, std::abs(ms.mean) / ms.std_error);
        }
    }
    for (std::size_t i = 0; i < opts.n_paths; ++i) column[i] = r_all[i * nodes + grid.n_steps()];
    const MeanStd terminal = reduce_ordered(column);
    double rms = 0.0;
    for (double v : column) rms += v * v;
    rms = std::sqrt(rms / static_cast<double>(opts.n_paths));

    out.mean_terminal = terminal.mean;
    out.stderr_terminal = terminal.std_error;
    out.rms_terminal = rms;
    out.max_martingale_sigma = worst_sigma;

    out.report.check = "clark_ocone";
    out.report.statistic = std::abs(terminal.mean);
    out.report.budget = 3.0 * std::sqrt(terminal.std_error * terminal.std_error +
                                        opts.phi0_std_error * opts.phi0_std_error);
    out.report.pass = out.report.statistic <= out.report.budget;
    out.report.max_abs = std::abs(terminal.mean);
    out.report.rms = rms;
    out.report.detail("rms_terminal", rms);
    out.report.detail("max_martingale_sigma", worst_sigma);
    return out;
}

namespace {

double path_directional_derivative(const Functional& f, const Path& x, const Path& p,
                                   double eps) {
    if (f.path_gradient) return f.path_gradient(x, p);
    const double horizon = x.grid().horizon();
    const double up = f.value(horizon, x.add_scaled(p, eps));
    const double dn = f.value(horizon, x.add_scaled(p, -eps));
    return (up - dn) / (2.0 * eps);
}

}  // namespace

ConvolutionPhiReport verify_convolution_phi(const Functional& f, const ConvolutionDrift& drift,
                                   const Matrix& b_matrix, const Path& y_hat,
                                   const ConvolutionPhiOptions& opts) {
    const TimeGrid& grid = y_hat.grid();
    const std::size_t dim_u = b_matrix.cols;
    const CoefficientSet coeffs = drift.to_coefficients(b_matrix);
    ConvolutionPhiReport out;

    // Chain rule vs coupled-noise finite differences for the vertical
    // gradient of phi at (t_hat, y_hat). Both sides run the pathwise solver
    // on the same noise streams, so the Monte Carlo noise cancels in the
    // comparison.
    {
        Vec e1(drift.dim, 0.0);
        e1[0] = 1.0;
        const Path bump = bump_direction(opts.t_hat, e1, grid);
        const std::uint64_t grad_seed = derive_seed(opts.seed, 0x51);

        std::vector<double> chain_vals(opts.n_paths, 0.0);
        const double eps_f = 1e-5;
        parallel_for(opts.n_paths, [&](std::size_t i) {
            const NoiseBundle noise = sample_noise(grid, dim_u, grad_seed, i);
            const DerivativeContext dctx =
                make_derivative_context(opts.t_hat, y_hat, drift, b_matrix, noise);
            const Path d = first_derivative(dctx, bump);
            chain_vals[i] = path_directional_derivative(f, dctx.solution(), d, eps_f);
        });
        const MeanStd chain = reduce_ordered(chain_vals);

        const TrajectorySolver psolver = make_pathwise_solver(drift, b_matrix);
        const double eps = 1e-4 * (1.0 + y_hat.sup_norm());
        const MCEstimate up = feynman_kac_with(psolver, dim_u, opts.t_hat,
                                               y_hat.add_scaled(bump, eps), f, opts.n_paths,
                                               grad_seed);
        const MCEstimate dn = feynman_kac_with(psolver, dim_u, opts.t_hat,
                                               y_hat.add_scaled(bump, -eps), f, opts.n_paths,
                                               grad_seed);
        const double fd_grad = (up.value - dn.value) / (2.0 * eps);

        ResidualReport rep;
        rep.check = "convolution_gradient_crosscheck";
        const double scale = std::max({std::abs(fd_grad), std::abs(chain.mean), 1e-12});
        rep.statistic = std::abs(chain.mean - fd_grad) / scale;
        rep.budget = opts.grad_rel_tol;
        rep.pass = rep.statistic <= rep.budget;
        rep.max_abs = rep.rms = rep.statistic;
        rep.detail("chain_rule", chain.mean);
        rep.detail("chain_stderr", chain.std_error);
        rep.detail("finite_difference", fd_grad);
        out.gradient_crosscheck = rep;
    }

    // Backward-equation and martingale-representation residuals with the
    // Euler engine behind the phi estimator (same SDE, much cheaper than the
    // fixed-point solver inside nested estimation).
    {
        KolmogorovOptions kopts;
        kopts.n_paths = opts.kolmogorov_paths;
        kopts.seed = derive_seed(opts.seed, 0x52);
        double t_mid = grid.node(grid.n_steps() / 2);
        if (t_mid <= 0.0) t_mid = grid.node(1);
        out.kolmogorov = kolmogorov_residual(f, coeffs, t_mid, y_hat, kopts);
    }
    {
        const TrajectorySolver esolver = make_euler_solver(coeffs);
        const std::uint64_t phi_seed = derive_seed(opts.seed, 0x53);
        const Functional phi =
            make_mc_value_functional(esolver, dim_u, f, opts.n_paths_phi, phi_seed);
        const MCEstimate phi0 =
            feynman_kac_with(esolver, dim_u, opts.t_hat, y_hat, f, opts.n_paths_phi, phi_seed);
        ClarkOconeOptions copts;
        copts.n_paths = opts.n_paths;
        copts.seed = derive_seed(opts.seed, 0x54);
        copts.terminal_only = true;
        copts.phi0_std_error = phi0.std_error;
        out.clark_ocone = clark_ocone_residual(phi, coeffs, opts.t_hat, y_hat, copts).report;
    }

    out.all_pass = out.gradient_crosscheck.pass && out.kolmogorov.pass && out.clark_ocone.pass;
    if (!out.gradient_crosscheck.pass)
        out.gradient_crosscheck.detail("regularity_assumption_violation", 1.0);
    return out;
}

}  // namespace funcito
