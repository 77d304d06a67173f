#include "funcito/noise.hpp"

#include <cmath>
#include <stdexcept>

#include "funcito/rng.hpp"

namespace funcito {

NoiseBundle sample_noise(const TimeGrid& grid, std::size_t dim_u, std::uint64_t seed,
                         std::uint64_t stream) {
    if (dim_u == 0) throw std::invalid_argument("sample_noise: dim_u must be >= 1");
    NoiseBundle nb;
    nb.grid = grid;
    nb.dim_u = dim_u;
    nb.seed = seed;
    nb.stream = stream;
    nb.increments.resize(grid.n_steps() * dim_u);
    const CounterRng rng(seed, stream);
    const double sdt = std::sqrt(grid.dt());
    for (std::size_t i = 0; i < nb.increments.size(); ++i) nb.increments[i] = sdt * rng.normal(i);
    return nb;
}

NoiseBundle NoiseBundle::coarsened(std::size_t factor) const {
    if (factor == 0 || grid.n_steps() % factor != 0)
        throw std::invalid_argument("NoiseBundle::coarsened: factor must divide n_steps");
    NoiseBundle nb;
    nb.grid = TimeGrid(grid.horizon(), grid.n_steps() / factor);
    nb.dim_u = dim_u;
    nb.seed = seed;
    nb.stream = stream;
    nb.increments.assign(nb.grid.n_steps() * dim_u, 0.0);
    for (std::size_t k = 0; k < grid.n_steps(); ++k) {
        const std::size_t kc = k / factor;
        for (std::size_t m = 0; m < dim_u; ++m)
            nb.increments[kc * dim_u + m] += increments[k * dim_u + m];
    }
    return nb;
}

Path integrate_constant_noise(const Matrix& b, const NoiseBundle& noise) {
    if (b.cols != noise.dim_u)
        throw std::invalid_argument("integrate_constant_noise: B columns must match noise dim");
    const TimeGrid& grid = noise.grid;
    std::vector<double> vals(grid.n_nodes() * b.rows, 0.0);
    Vec cur(b.rows, 0.0);
    for (std::size_t k = 0; k < grid.n_steps(); ++k) {
        const Vec dw = b.apply(noise.step(k));
        for (std::size_t i = 0; i < b.rows; ++i) cur[i] += dw[i];
        std::copy(cur.begin(), cur.end(), vals.begin() + (k + 1) * b.rows);
    }
    return Path(grid, b.rows, std::move(vals), PathKind::ContinuousSample);
}

}  // namespace funcito
