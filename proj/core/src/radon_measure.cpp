#include "funcito/radon_measure.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace funcito {

RadonMeasure::RadonMeasure(TimeGrid grid, std::vector<Atom> atoms, std::vector<double> density)
    : grid_(grid), atoms_(std::move(atoms)), density_(std::move(density)) {
    for (const Atom& a : atoms_) {
        if (!std::isfinite(a.weight)) throw std::invalid_argument("RadonMeasure: non-finite weight");
        if (!grid_.is_aligned(a.at))
            throw std::invalid_argument("RadonMeasure: atom at t=" + std::to_string(a.at) +
                                        " is not grid-aligned");
    }
    if (!density_.empty() && density_.size() != grid_.n_steps())
        throw std::invalid_argument("RadonMeasure: density needs one value per cell");
    for (double d : density_)
        if (!std::isfinite(d)) throw std::invalid_argument("RadonMeasure: non-finite density");
}

RadonMeasure RadonMeasure::dirac(const TimeGrid& grid, double at, double weight) {
    return RadonMeasure(grid, {Atom{at, weight}});
}

RadonMeasure RadonMeasure::lebesgue(const TimeGrid& grid, double scale) {
    return RadonMeasure(grid, {}, std::vector<double>(grid.n_steps(), scale));
}

RadonMeasure RadonMeasure::plus(const RadonMeasure& other) const {
    if (!(other.grid_ == grid_)) throw std::invalid_argument("RadonMeasure::plus: grid mismatch");
    std::vector<Atom> atoms = atoms_;
    atoms.insert(atoms.end(), other.atoms_.begin(), other.atoms_.end());
    std::vector<double> density;
    if (!density_.empty() || !other.density_.empty()) {
        density.assign(grid_.n_steps(), 0.0);
        for (std::size_t k = 0; k < density_.size(); ++k) density[k] += density_[k];
        for (std::size_t k = 0; k < other.density_.size(); ++k) density[k] += other.density_[k];
    }
    return RadonMeasure(grid_, std::move(atoms), std::move(density));
}

double total_variation(const RadonMeasure& mu) {
    double tv = 0.0;
    for (const auto& a : mu.atoms()) tv += std::abs(a.weight);
    const double dt = mu.grid().dt();
    for (double d : mu.density()) tv += std::abs(d) * dt;
    return tv;
}

double seminorm(const Path& x, const RadonMeasure& nu) {
    Vec acc(x.dim(), 0.0);
    for (const auto& a : nu.atoms()) {
        const Vec v = x.eval(a.at);
        axpy(a.weight, v, acc);
    }
    if (nu.has_density()) {
        const double dt = nu.grid().dt();
        for (std::size_t k = 0; k < nu.density().size(); ++k) {
            const double mid = (nu.grid().node(k) + nu.grid().node(k + 1)) / 2.0;
            const Vec v = x.eval(mid);
            axpy(nu.density()[k] * dt, v, acc);
        }
    }
    return norm2(acc);
}

Vec convolve_history(const Path& x, double t, const RadonMeasure& mu) {
    const ExtendedPath ext(x);
    Vec acc(x.dim(), 0.0);
    for (const auto& a : mu.atoms()) {
        const Vec v = ext.eval(t - a.at);
        axpy(a.weight, v, acc);
    }
    if (mu.has_density()) {
        const double dt = mu.grid().dt();
        for (std::size_t k = 0; k < mu.density().size(); ++k) {
            const double mid = (mu.grid().node(k) + mu.grid().node(k + 1)) / 2.0;
            const Vec v = ext.eval(t - mid);
            axpy(mu.density()[k] * dt, v, acc);
        }
    }
    return acc;
}

}  // namespace funcito
