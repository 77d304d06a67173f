#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace funcito {

/// Uniform grid 0 = t_0 < t_1 < ... < t_n = T with spacing dt = T/n.
/// Arbitrary partitions are realized as uniform refinements of this grid.
class TimeGrid {
public:
    TimeGrid() = default;

    TimeGrid(double horizon, std::size_t n_steps) : horizon_(horizon), n_steps_(n_steps) {
        if (!(horizon > 0.0)) throw std::invalid_argument("TimeGrid: horizon must be > 0");
        if (n_steps == 0) throw std::invalid_argument("TimeGrid: n_steps must be >= 1");
    }

    double horizon() const { return horizon_; }
    std::size_t n_steps() const { return n_steps_; }
    std::size_t n_nodes() const { return n_steps_ + 1; }
    double dt() const { return horizon_ / static_cast<double>(n_steps_); }
    double node(std::size_t k) const { return horizon_ * static_cast<double>(k) / static_cast<double>(n_steps_); }

    bool operator==(const TimeGrid& other) const {
        return horizon_ == other.horizon_ && n_steps_ == other.n_steps_;
    }

    /// Nearest-node snap. Times outside [0,T] (beyond a small rounding slack)
    /// are a domain error; see `nearest_index` for the in-domain guarantee.
    std::size_t snap_index(double t) const {
        const double slack = 1e-9 * std::max(1.0, horizon_);
        if (t < -slack || t > horizon_ + slack)
            throw std::invalid_argument("TimeGrid: time outside [0, T]");
        return nearest_index(t);
    }

    /// Index of the node nearest to t, without the domain check.
    std::size_t nearest_index(double t) const {
        const double k = std::round(t / dt());
        const double kk = std::min(std::max(k, 0.0), static_cast<double>(n_steps_));
        return static_cast<std::size_t>(kk);
    }

    /// Strict alignment: t must coincide with a node up to rounding noise.
    /// Used for measure atoms and restart times, where silent snapping would
    /// alias delay lags.
    std::size_t aligned_index(double t, double rel_tol = 1e-9) const {
        const std::size_t k = snap_index(t);
        if (std::abs(t - node(k)) > rel_tol * std::max(1.0, horizon_))
            throw std::invalid_argument("TimeGrid: time is not grid-aligned");
        return k;
    }

    bool is_aligned(double t, double rel_tol = 1e-9) const {
        if (t < 0.0 || t > horizon_ + 1e-9 * std::max(1.0, horizon_)) return false;
        const std::size_t k = nearest_index(t);
        return std::abs(t - node(k)) <= rel_tol * std::max(1.0, horizon_);
    }

    /// True when `coarse` has the same horizon and its nodes are a subset of
    /// this grid's nodes.
    bool refines(const TimeGrid& coarse) const {
        if (coarse.horizon_ != horizon_) return false;
        return n_steps_ % coarse.n_steps_ == 0;
    }

private:
    double horizon_ = 1.0;
    std::size_t n_steps_ = 1;
};

}  // namespace funcito
