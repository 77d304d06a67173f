#include "funcito/sde.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace funcito {

namespace {

void check_setup(const ItoProcessSpec& spec, const NoiseBundle& noise) {
    if (!(spec.initial.grid() == noise.grid))
        throw std::invalid_argument("sde: initial path and noise must share the grid");
}

Path run_steps(const ItoProcessSpec& spec, const NoiseBundle& noise,
               const std::function<void(std::size_t, const Path&, Vec&, Matrix&)>& coeff_at) {
    const TimeGrid& grid = spec.initial.grid();
    const std::size_t dim = spec.initial.dim();
    const std::size_t k0 = grid.aligned_index(spec.start_time);

    std::vector<double> buf = spec.initial.stopped_at_node(k0).dense_values();
    const double guard = 1e6 * (1.0 + spec.initial.sup_norm());
    const double dt = grid.dt();

    Vec b;
    Matrix phi;
    for (std::size_t k = k0; k < grid.n_steps(); ++k) {
        const Path view = detail_borrowed_view(grid, dim, &buf, spec.initial.kind(), k);
        coeff_at(k, view, b, phi);
        if (b.size() != dim || phi.rows != dim || phi.cols != noise.dim_u)
            throw std::invalid_argument("sde: coefficient shape mismatch at step " +
                                        std::to_string(k));
        const Vec gdw = phi.apply(noise.step(k));
        double nrm = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double next = buf[k * dim + i] + b[i] * dt + gdw[i];
            buf[(k + 1) * dim + i] = next;
            nrm += next * next;
        }
        if (!std::isfinite(nrm) || std::sqrt(nrm) > guard)
            throw SolveError("sde: divergence at step " + std::to_string(k + 1) + " (t=" +
                             std::to_string(grid.node(k + 1)) + "), |X| exceeds " +
                             std::to_string(guard));
    }
    return Path(grid, dim, std::move(buf), spec.initial.kind());
}

}  // namespace

Path integrate_ito_process(const ItoProcessSpec& spec, const NoiseBundle& noise) {
    check_setup(spec, noise);
    const std::size_t n = spec.initial.grid().n_steps();
    if (spec.drift_steps.size() != n || spec.diffusion_steps.size() != n)
        throw std::invalid_argument("integrate_ito_process: need one integrand value per step");
    return run_steps(spec, noise, [&](std::size_t k, const Path&, Vec& b, Matrix& phi) {
        b = spec.drift_steps[k];
        phi = spec.diffusion_steps[k];
    });
}

Path euler_maruyama(const ItoProcessSpec& spec, const CoefficientSet& coeffs,
                    const NoiseBundle& noise) {
    check_setup(spec, noise);
    if (!spec.drift_steps.empty() || !spec.diffusion_steps.empty())
        throw std::invalid_argument("euler_maruyama: spec carries raw integrands; use "
                                    "integrate_ito_process");
    const TimeGrid& grid = spec.initial.grid();
    return run_steps(spec, noise, [&](std::size_t k, const Path& view, Vec& b, Matrix& phi) {
        const double t = grid.node(k);
        b = coeffs.drift(t, view);
        phi = coeffs.diffusion(t, view);
    });
}

RealizedCoefficients realized_coefficients(const Path& x, const CoefficientSet& coeffs) {
    const TimeGrid& grid = x.grid();
    RealizedCoefficients rc;
    rc.drift.reserve(grid.n_steps());
    rc.diffusion.reserve(grid.n_steps());
    for (std::size_t k = 0; k < grid.n_steps(); ++k) {
        const Path stopped = x.stopped_at_node(k);
        rc.drift.push_back(coeffs.drift(grid.node(k), stopped));
        rc.diffusion.push_back(coeffs.diffusion(grid.node(k), stopped));
    }
    return rc;
}

std::vector<Path> stopped_coordinates(const Path& x, const TimeGrid& coarse) {
    if (!x.grid().refines(coarse))
        throw std::invalid_argument("stopped_coordinates: partition does not nest in the grid");
    const std::size_t ratio = x.grid().n_steps() / coarse.n_steps();
    std::vector<Path> out;
    out.reserve(coarse.n_nodes());
    for (std::size_t i = 1; i <= coarse.n_steps(); ++i)
        out.push_back(x.stopped_at_node(i * ratio));
    out.push_back(x);
    return out;
}

std::vector<Vec> partition_drift_slots(const Vec& b_s, double s, const TimeGrid& coarse) {
    const std::size_t n = coarse.n_nodes();
    std::vector<Vec> slots(n, Vec(b_s.size(), 0.0));
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (s < coarse.node(i + 1)) slots[i] = b_s;
    if (s <= coarse.horizon()) slots[n - 1] = b_s;
    return slots;
}

std::vector<Matrix> partition_diffusion_slots(const Matrix& phi_s, double s,
                                              const TimeGrid& coarse) {
    const std::size_t n = coarse.n_nodes();
    std::vector<Matrix> slots(n, Matrix(phi_s.rows, phi_s.cols));
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (s < coarse.node(i + 1)) slots[i] = phi_s;
    if (s <= coarse.horizon()) slots[n - 1] = phi_s;
    return slots;
}

double flow_residual(double t, const Path& x, double s, const CoefficientSet& coeffs,
                     const NoiseBundle& noise) {
    if (s < t) throw std::invalid_argument("flow_residual: requires t <= s");
    ItoProcessSpec from_t;
    from_t.start_time = t;
    from_t.initial = x;
    const Path first = euler_maruyama(from_t, coeffs, noise);
    ItoProcessSpec from_s;
    from_s.start_time = s;
    from_s.initial = first;
    const Path restarted = euler_maruyama(from_s, coeffs, noise);
    return sup_norm_diff(first, restarted);
}

}  // namespace funcito
