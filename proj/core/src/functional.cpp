#include "funcito/functional.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "funcito/rng.hpp"

namespace funcito {

double FDScheme::effective_h(const TimeGrid& grid) const {
    const double dt = grid.dt();
    if (h <= 0.0) return dt;
    if (h < dt / 8.0 - 1e-15 * dt)
        throw std::invalid_argument("FDScheme: h below dt/8 is not supported");
    return h;
}

double check_nonanticipativity(const Functional& u, const TimeGrid& grid, std::size_t dim,
                               std::size_t samples, std::uint64_t seed) {
    if (samples == 0) throw std::invalid_argument("check_nonanticipativity: samples >= 1");
    double worst = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const CounterRng rng(seed, s);
        std::vector<double> vals(grid.n_nodes() * dim);
        for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = rng.normal(i);
        const Path x(grid, dim, std::move(vals));
        const std::size_t kt = rng.raw(1u << 20) % grid.n_nodes();
        const double t = grid.node(kt);
        const double full = u.value(t, x);
        const double stopped = u.value(t, x.stopped_at_node(kt));
        worst = std::max(worst, std::abs(full - stopped));
    }
    return worst;
}

namespace {

double checked(double value, const char* op, double t, double eps) {
    if (!std::isfinite(value))
        throw std::runtime_error(std::string(op) + ": non-finite evaluation at t=" +
                                 std::to_string(t) + ", eps=" + std::to_string(eps));
    return value;
}

}  // namespace

double vertical_derivative(const Functional& u, double t, const Path& x, const Vec& v,
                           const FDScheme& scheme) {
    if (scheme.use_callbacks && u.vertical) return u.vertical(t, x, v);
    const double eps = scheme.effective_epsilon(x);
    const Path bump = bump_direction(t, v, x.grid());
    const double up = checked(u.value(t, x.add_scaled(bump, eps)), "vertical_derivative", t, eps);
    const double dn = checked(u.value(t, x.add_scaled(bump, -eps)), "vertical_derivative", t, eps);
    return (up - dn) / (2.0 * eps);
}

double second_vertical_derivative(const Functional& u, double t, const Path& x, const Vec& v,
                                  const Vec& w, const FDScheme& scheme) {
    if (scheme.use_callbacks && u.second_vertical) return u.second_vertical(t, x, v, w);
    const double eps = scheme.effective_epsilon2(x);
    const Path bv = bump_direction(t, v, x.grid());
    const Path bw = bump_direction(t, w, x.grid());
    const double pp = checked(u.value(t, x.add_scaled(bv, eps).add_scaled(bw, eps)),
                              "second_vertical_derivative", t, eps);
    const double pm = checked(u.value(t, x.add_scaled(bv, eps).add_scaled(bw, -eps)),
                              "second_vertical_derivative", t, eps);
    const double mp = checked(u.value(t, x.add_scaled(bv, -eps).add_scaled(bw, eps)),
                              "second_vertical_derivative", t, eps);
    const double mm = checked(u.value(t, x.add_scaled(bv, -eps).add_scaled(bw, -eps)),
                              "second_vertical_derivative", t, eps);
    return (pp - pm - mp + mm) / (4.0 * eps * eps);
}

namespace {

/// One-sided quotient [u(t, x_{(t-h) ^ .}) - u(t-h, x)] / h.
double left_time_quotient(const Functional& u, double t, const Path& x, double h) {
    const TimeGrid& grid = x.grid();
    Path frozen = Path();
    const double tau = t - h;
    if (grid.is_aligned(tau))
        frozen = x.stopped_at_node(grid.aligned_index(tau));
    else
        frozen = x.frozen_after(tau);
    const double a = u.value(t, frozen);
    const double b = u.value(tau, x);
    if (!std::isfinite(a) || !std::isfinite(b))
        throw std::runtime_error("left_time_derivative: non-finite evaluation at t=" +
                                 std::to_string(t) + ", h=" + std::to_string(h));
    return (a - b) / h;
}

}  // namespace

double left_time_derivative(const Functional& u, double t, const Path& x, const FDScheme& scheme) {
    if (t <= 0.0) throw std::invalid_argument("left_time_derivative: requires t > 0");
    if (scheme.use_callbacks && u.left_time) return u.left_time(t, x);

    double h = scheme.effective_h(x.grid());
    if (h > t) h = t;

    if (scheme.order == FDOrder::First) return left_time_quotient(u, t, x, h);

    // Richardson on the first-order one-sided quotient. Monte Carlo closures
    // are only evaluable at grid times, so they pair (h, 2h); everything else
    // pairs (h/2, h).
    if (u.grid_times_only) {
        if (2.0 * h <= t + 1e-12 * t)
            return 2.0 * left_time_quotient(u, t, x, h) - left_time_quotient(u, t, x, 2.0 * h);
        return left_time_quotient(u, t, x, h);
    }
    return 2.0 * left_time_quotient(u, t, x, h / 2.0) - left_time_quotient(u, t, x, h);
}

double trace_term(const Functional& u, double t, const Path& x, const Matrix& phi,
                  const BasisSpec& basis, const FDScheme& scheme) {
    if (!all_finite(phi.data)) throw std::invalid_argument("trace_term: non-finite diffusion");
    if (phi.cols != basis.dim_u) throw std::invalid_argument("trace_term: basis/diffusion mismatch");
    double acc = 0.0;
    for (std::size_t m = 0; m < basis.dim_u; ++m) {
        const Vec dir = phi.apply(basis.noise_basis_vector(m));
        acc += second_vertical_derivative(u, t, x, dir, dir, scheme);
    }
    return acc;
}

double generator(const Functional& u, double t, const Path& x, const CoefficientSet& coeffs,
                 const FDScheme& scheme) {
    const Vec b = coeffs.drift(t, x);
    const Matrix phi = coeffs.diffusion(t, x);
    const BasisSpec basis(coeffs.dim_h, coeffs.dim_u);
    return vertical_derivative(u, t, x, b, scheme) +
           0.5 * trace_term(u, t, x, phi, basis, scheme);
}

CallbackCrosscheck crosscheck_callbacks(const Functional& u, double t, const Path& x,
                                        const Vec& v, const FDScheme& scheme) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    FDScheme fd_only = scheme;
    fd_only.use_callbacks = false;

    CallbackCrosscheck cc{t, nan, nan, nan, nan, nan, nan, nan, nan, nan};
    if (u.vertical) {
        cc.vertical_callback = u.vertical(t, x, v);
        cc.vertical_fd = vertical_derivative(u, t, x, v, fd_only);
        cc.vertical_gap = std::abs(cc.vertical_callback - cc.vertical_fd);
    }
    if (u.second_vertical) {
        cc.second_callback = u.second_vertical(t, x, v, v);
        cc.second_fd = second_vertical_derivative(u, t, x, v, v, fd_only);
        cc.second_gap = std::abs(cc.second_callback - cc.second_fd);
    }
    if (u.left_time && t > 0.0) {
        cc.left_time_callback = u.left_time(t, x);
        FDScheme rich = fd_only;
        rich.order = FDOrder::Richardson;
        cc.left_time_fd = left_time_derivative(u, t, x, rich);
        cc.left_time_gap = std::abs(cc.left_time_callback - cc.left_time_fd);
    }
    return cc;
}

}  // namespace funcito
