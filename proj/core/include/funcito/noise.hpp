#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "funcito/la.hpp"
#include "funcito/path.hpp"
#include "funcito/time_grid.hpp"

namespace funcito {

/// Brownian increments for one trajectory: n_steps x M, each entry
/// ~ Normal(0, dt), reproducible from (seed, stream) alone. Stream ids key
/// independent trajectories of a Monte Carlo ensemble.
struct NoiseBundle {
    TimeGrid grid;
    std::size_t dim_u = 1;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::vector<double> increments;  // n_steps * dim_u, row per step

    std::span<const double> step(std::size_t k) const {
        return {increments.data() + k * dim_u, dim_u};
    }

    /// Coarse-grid increments by block summation: the same Brownian path seen
    /// on a coarser grid, for coupled refinement studies.
    NoiseBundle coarsened(std::size_t factor) const;
};

NoiseBundle sample_noise(const TimeGrid& grid, std::size_t dim_u, std::uint64_t seed,
                         std::uint64_t stream);

/// W^B(t_k) = sum_{j<k} B dW_j: a fixed representant of the stochastic
/// integral of a constant operator B against W.
Path integrate_constant_noise(const Matrix& b, const NoiseBundle& noise);

}  // namespace funcito
