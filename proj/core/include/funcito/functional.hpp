#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>

#include "funcito/coefficients.hpp"
#include "funcito/path.hpp"

namespace funcito {

/// A non-anticipative functional u(t, x) with optional analytic derivative
/// callbacks. Evaluators must accept step paths (bumped arguments are step
/// paths) and must be reentrant; all derivative operations are then safe to
/// call concurrently.
struct Functional {
    std::string name;

    std::function<double(double, const Path&)> value;

    /// Vertical derivative in direction 1_{[t,T]} v, v in R^N.
    std::function<double(double, const Path&, const Vec&)> vertical;
    /// Second vertical derivative, bilinear in (v, w).
    std::function<double(double, const Path&, const Vec&, const Vec&)> second_vertical;
    /// Left time derivative D_t^- u(t, x).
    std::function<double(double, const Path&)> left_time;

    /// Gateaux derivative along a whole-path direction p (terminal-style
    /// functionals only); used by chain-rule cross-checks.
    std::function<double(const Path&, const Path&)> path_gradient;

    /// Declared bounds on the first/second vertical derivatives, if known.
    double bound_first = std::numeric_limits<double>::quiet_NaN();
    double bound_second = std::numeric_limits<double>::quiet_NaN();

    /// Evaluator only defined at grid times (e.g. Monte Carlo closures);
    /// time quotients then use grid-aligned offsets.
    bool grid_times_only = false;

    double operator()(double t, const Path& x) const { return value(t, x); }
};

enum class FDOrder { First, Richardson };

/// Finite-difference discretization of the derivative limits. epsilon/h of 0
/// mean "auto": epsilon = 1e-4 (1 + |x|_inf) for central differences and
/// 4e-3 (1 + |x|_inf) for the 4-point second-order stencil (whose rounding
/// floor scales like eps^-2), h = dt. h may go below dt, down to dt/8, via
/// sub-grid stopping.
struct FDScheme {
    double epsilon = 0.0;
    double h = 0.0;
    FDOrder order = FDOrder::First;
    bool use_callbacks = true;

    double effective_epsilon(const Path& x) const {
        return epsilon > 0.0 ? epsilon : 1e-4 * (1.0 + x.sup_norm());
    }
    double effective_epsilon2(const Path& x) const {
        return epsilon > 0.0 ? epsilon : 4e-3 * (1.0 + x.sup_norm());
    }
    double effective_h(const TimeGrid& grid) const;
};

/// Max over random (t, x) samples of |u(t,x) - u(t, x_{t ^ .})|; zero (up to
/// rounding in the evaluator) iff u ignores the path after t.
double check_nonanticipativity(const Functional& u, const TimeGrid& grid, std::size_t dim,
                               std::size_t samples, std::uint64_t seed);

double vertical_derivative(const Functional& u, double t, const Path& x, const Vec& v,
                           const FDScheme& scheme = {});

double second_vertical_derivative(const Functional& u, double t, const Path& x, const Vec& v,
                                  const Vec& w, const FDScheme& scheme = {});

double left_time_derivative(const Functional& u, double t, const Path& x,
                            const FDScheme& scheme = {.order = FDOrder::Richardson});

/// Sum over the noise basis of the second vertical derivative along the
/// diffusion columns; basis-independent by construction.
double trace_term(const Functional& u, double t, const Path& x, const Matrix& phi,
                  const BasisSpec& basis, const FDScheme& scheme = {});

/// L u = du.(1_{[t,T]} b(t,x)) + 1/2 T[d2u, 1_{[t,T]} Phi(t,x)].
double generator(const Functional& u, double t, const Path& x, const CoefficientSet& coeffs,
                 const FDScheme& scheme = {});

/// When a functional carries analytic callbacks they are authoritative; this
/// recomputes each derivative by finite differences as a consistency
/// diagnostic. Entries for absent callbacks are NaN.
struct CallbackCrosscheck {
    double t = 0.0;
    double vertical_callback, vertical_fd, vertical_gap;
    double second_callback, second_fd, second_gap;
    double left_time_callback, left_time_fd, left_time_gap;
};

CallbackCrosscheck crosscheck_callbacks(const Functional& u, double t, const Path& x,
                                        const Vec& v, const FDScheme& scheme = {});

}  // namespace funcito
