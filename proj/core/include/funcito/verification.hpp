#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "funcito/functional.hpp"
#include "funcito/pathwise.hpp"
#include "funcito/sde.hpp"

namespace funcito {

/// A Monte Carlo point estimate with its standard error; reproducible from
/// (seed, n_paths) alone and invariant under trajectory reordering.
struct MCEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
};

/// Outcome of one numerical certification: a headline statistic checked
/// against a budget, with whatever per-node or named detail the check keeps.
struct ResidualReport {
    std::string check;
    double statistic = 0.0;
    double budget = 0.0;
    bool pass = false;
    double max_abs = 0.0;
    double rms = 0.0;
    std::string note;
    std::vector<double> per_node;
    std::vector<std::pair<std::string, double>> details;

    void detail(const std::string& key, double v) { details.emplace_back(key, v); }
};

/// Produces one trajectory from (t, x) under a given noise realization.
using TrajectorySolver = std::function<Path(double, const Path&, const NoiseBundle&)>;

TrajectorySolver make_euler_solver(const CoefficientSet& coeffs);
TrajectorySolver make_pathwise_solver(const ConvolutionDrift& drift, const Matrix& b_matrix);

/// phi(t, x) = E[f(X^{t,x})] over n_paths independent trajectories, streams
/// keyed by trajectory index; the reduction is sequential in stream order, so
/// the estimate does not depend on the worker count.
MCEstimate feynman_kac_with(const TrajectorySolver& solver, std::size_t dim_u, double t,
                            const Path& x, const Functional& f, std::size_t n_paths,
                            std::uint64_t seed);

MCEstimate feynman_kac(double t, const Path& x, const Functional& f,
                       const CoefficientSet& coeffs, std::size_t n_paths, std::uint64_t seed);

/// phi as an evaluatable functional backed by the Monte Carlo estimator with
/// frozen seed (common random numbers across every evaluation), marked
/// grid_times_only so time quotients stay grid-aligned.
Functional make_mc_value_functional(const TrajectorySolver& solver, std::size_t dim_u,
                                    const Functional& f, std::size_t n_paths,
                                    std::uint64_t seed);

/// |phi(t', x) - E[phi(t, X^{t',x})]| with a nested estimator; passes when
/// within 3 combined standard errors.
ResidualReport tower_residual(double t_prime, double t, const Path& x, const Functional& f,
                              const CoefficientSet& coeffs, std::size_t n_outer,
                              std::size_t n_inner, std::uint64_t seed);

struct ItoOptions {
    /// Derivative discretization for the space terms (left endpoints).
    FDScheme space;
    /// Time-quotient scheme. The default pairs the one-sided quotient with
    /// the integration step (h = dt, no Richardson), which makes the discrete
    /// formula telescope exactly for functionals it represents exactly.
    FDScheme time{.order = FDOrder::First};
};

/// Per-node residual of the path-dependent Ito formula along one realized
/// trajectory: u(t, X) minus the discretized right-hand side (time term by
/// right-endpoint quotients, space/trace/Ito terms at left endpoints).
ResidualReport ito_residual(const Functional& u, double t_hat, const Path& y_hat,
                            const CoefficientSet& coeffs, const NoiseBundle& noise,
                            const ItoOptions& opts = {});

/// D_t^- phi + L phi at (t, x), with the scheme applied to both terms.
double kolmogorov_pointwise(const Functional& phi, const CoefficientSet& coeffs, double t,
                            const Path& x, const FDScheme& scheme);

/// Backward-equation residual with an analytically known phi; budget is the
/// caller's tolerance.
ResidualReport kolmogorov_residual_analytic(const Functional& phi, const CoefficientSet& coeffs,
                                            double t, const Path& x, double tol);

struct KolmogorovOptions {
    std::size_t n_paths = 8000;
    std::uint64_t seed = 1;
    std::size_t replicas = 3;   // independent seed groups for the error bar
    FDScheme fd{.order = FDOrder::Richardson};
    /// Adds |r(dt) - r(2 dt)| (a C*dt proxy from one refinement pair) to the
    /// 3-sigma budget.
    bool dt_budget_term = true;
};

/// Backward-equation residual with phi estimated by Feynman-Kac under common
/// random numbers; budget = 3 * (replica std error) + estimated C * dt.
ResidualReport kolmogorov_residual(const Functional& f, const CoefficientSet& coeffs, double t,
                                   const Path& x, const KolmogorovOptions& opts,
                                   const TrajectorySolver* solver = nullptr,
                                   std::size_t dim_u_override = 0);

struct ClarkOconeOptions {
    std::size_t n_paths = 1000;
    std::uint64_t seed = 1;
    FDScheme fd;
    /// Skip the per-node phi values and only form R(T); the cheap mode for
    /// Monte-Carlo-backed phi, where each phi value is itself an ensemble.
    bool terminal_only = false;
    /// Standard error of phi(t_hat, y_hat) when it was itself estimated;
    /// folded into the mean-zero budget.
    double phi0_std_error = 0.0;
};

struct ClarkOconeResult {
    ResidualReport report;        // headline: |mean R(T)| vs 3 stderr
    double mean_terminal = 0.0;
    double stderr_terminal = 0.0;
    double rms_terminal = 0.0;
    double max_martingale_sigma = 0.0;  // max_k |mean R(t_k)| / stderr_k
    std::vector<double> mean_per_node;
};

/// Martingale-representation residual R(t) = phi(t, X) - phi(that, Yhat)
/// - sum_j dphi(t_j, X).(1 Phi_j dW_j) over an ensemble; passes when the
/// terminal ensemble mean is within 3 standard errors of zero.
ClarkOconeResult clark_ocone_residual(const Functional& phi, const CoefficientSet& coeffs,
                                      double t_hat, const Path& y_hat,
                                      const ClarkOconeOptions& opts);

struct ConvolutionPhiOptions {
    double t_hat = 0.0;
    std::size_t n_paths = 64;        // ensemble for gradients and Clark-Ocone
    std::size_t n_paths_phi = 256;   // inner paths behind the phi estimator
    std::uint64_t seed = 1;
    double grad_rel_tol = 1e-3;
    std::size_t kolmogorov_paths = 4000;
};

struct ConvolutionPhiReport {
    ResidualReport gradient_crosscheck;  // chain rule vs coupled-noise FD
    ResidualReport kolmogorov;
    ResidualReport clark_ocone;
    bool all_pass = false;
};

/// The convolution-drift certification bundle: phi built from f via the
/// pathwise solver, its gradient computed both by coupled-noise finite
/// differences and by the chain rule through the solution-map derivative,
/// then the Kolmogorov and Clark-Ocone checks on top. A gradient disagreement
/// beyond budget is flagged as a regularity-assumption violation.
ConvolutionPhiReport verify_convolution_phi(const Functional& f, const ConvolutionDrift& drift,
                                   const Matrix& b_matrix, const Path& y_hat,
                                   const ConvolutionPhiOptions& opts = {});

}  // namespace funcito
