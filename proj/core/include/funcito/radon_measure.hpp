#pragma once

#include <vector>

#include "funcito/path.hpp"
#include "funcito/time_grid.hpp"

namespace funcito {

/// Finite signed measure on [0,T]: weighted Dirac atoms plus a
/// piecewise-constant density (one value per grid cell). Atom locations must
/// sit on grid nodes so that delayed path evaluation never interpolates.
class RadonMeasure {
public:
    struct Atom {
        double at = 0.0;
        double weight = 0.0;
    };

    /// The zero measure on the default grid.
    RadonMeasure() = default;

    RadonMeasure(TimeGrid grid, std::vector<Atom> atoms, std::vector<double> density = {});

    static RadonMeasure dirac(const TimeGrid& grid, double at, double weight = 1.0);
    /// density == 1 on [0,T]; total mass T.
    static RadonMeasure lebesgue(const TimeGrid& grid, double scale = 1.0);

    const TimeGrid& grid() const { return grid_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<double>& density() const { return density_; }
    bool has_density() const { return !density_.empty(); }

    /// mu1 + mu2 on a common grid.
    RadonMeasure plus(const RadonMeasure& other) const;

private:
    TimeGrid grid_;
    std::vector<Atom> atoms_;
    std::vector<double> density_;  // empty, or one value per cell
};

/// |mu|_1 = sum |w_i| + sum |d_k| dt.
double total_variation(const RadonMeasure& mu);

/// Seminorm p_nu(x) = | integral of x against nu |, atoms exactly and the
/// density by the midpoint rule per cell.
double seminorm(const Path& x, const RadonMeasure& nu);

/// The history extension of a path to [-T, T]: constant at x(0) before 0.
class ExtendedPath {
public:
    explicit ExtendedPath(Path base) : base_(std::move(base)) {}

    const Path& base() const { return base_; }

    Vec eval(double r) const {
        if (r < 0.0) return Vec(base_.node(0).begin(), base_.node(0).end());
        return base_.eval(r);
    }

private:
    Path base_;
};

inline ExtendedPath extend_history(const Path& x) { return ExtendedPath(x); }

/// integral over [0,T] of x~(t - s) mu(ds), with x~ the history extension.
/// With mu = delta_0 this is x(t) (Markovian case); with mu = delta_a it is
/// the pointwise delay x(t - a), frozen at x(0) while t < a.
Vec convolve_history(const Path& x, double t, const RadonMeasure& mu);

}  // namespace funcito
