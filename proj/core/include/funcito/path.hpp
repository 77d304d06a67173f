#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "funcito/la.hpp"
#include "funcito/time_grid.hpp"

namespace funcito {

/// Sample class of a grid path: a continuous function sampled at the nodes
/// (mid-node queries interpolate linearly) or a right-continuous step
/// function (mid-node queries hold the left node value).
enum class PathKind { ContinuousSample, Step };

/// A function [0,T] -> R^N stored by its values at the grid nodes.
///
/// Paths are immutable after construction and cheap to stop: stopping at
/// node k clamps the accessible index range instead of copying, so
/// node(j) == node(min(j, stop_node)). Frozen tails therefore never have to
/// be materialized, and repeated stopping composes by index minimum.
class Path {
public:
    Path() = default;

    Path(TimeGrid grid, std::size_t dim, std::vector<double> values,
         PathKind kind = PathKind::ContinuousSample);

    /// Constant path x(t) = value.
    static Path constant(const TimeGrid& grid, const Vec& value,
                         PathKind kind = PathKind::ContinuousSample);

    static Path zero(const TimeGrid& grid, std::size_t dim,
                     PathKind kind = PathKind::ContinuousSample);

    const TimeGrid& grid() const { return grid_; }
    std::size_t dim() const { return dim_; }
    PathKind kind() const { return kind_; }
    std::size_t n_nodes() const { return grid_.n_nodes(); }
    std::size_t stop_node() const { return stop_node_; }

    /// Value at node k, with the stop clamp applied.
    std::span<const double> node(std::size_t k) const {
        const std::size_t kk = std::min(k, stop_node_);
        return {data_->data() + kk * dim_, dim_};
    }

    double node_scalar(std::size_t k, std::size_t i = 0) const { return node(k)[i]; }

    /// Value at an arbitrary time in [0,T], using the kind convention for
    /// mid-node queries.
    Vec eval(double t) const;
    double eval_scalar(double t, std::size_t i = 0) const;

    /// Max over nodes of the Euclidean norm.
    double sup_norm() const;

    /// Dense copy of the node values with the stop clamp baked in.
    std::vector<double> dense_values() const;

    /// Stop at a grid node / at a snapped time: O(1), shares storage.
    Path stopped_at_node(std::size_t k) const;
    Path stopped(double t) const;

    /// Stop at an arbitrary (possibly off-grid) time: nodes <= tau keep their
    /// values, later nodes freeze at eval(tau). Needed for sub-grid time
    /// quotients; materializes a copy.
    Path frozen_after(double tau) const;

    /// this + c * other, as a dense new path. The sum of a continuous path
    /// and a step path is a step path.
    Path add_scaled(const Path& other, double c) const;

    /// Transfer to another grid with the same horizon by evaluating at its
    /// nodes: exact whenever the node sets nest (refinement or coarsening),
    /// interpolation otherwise.
    Path sampled_on(const TimeGrid& other) const;

    Path with_kind(PathKind kind) const;

private:
    friend Path detail_borrowed_view(const TimeGrid&, std::size_t, const std::vector<double>*,
                                     PathKind, std::size_t);

    TimeGrid grid_;
    std::size_t dim_ = 0;
    PathKind kind_ = PathKind::ContinuousSample;
    std::shared_ptr<const std::vector<double>> data_;
    std::size_t stop_node_ = 0;
};

/// Non-owning Path over an external buffer, stopped at `stop_node`. The view
/// is only valid while the buffer lives and must not be retained by callees;
/// the SDE integrator uses it to hand coefficients a stopped read window
/// without copying.
Path detail_borrowed_view(const TimeGrid& grid, std::size_t dim, const std::vector<double>* buf,
                          PathKind kind, std::size_t stop_node);

/// x_{t ^ .}: the path frozen at its value at time t (snapped to the grid).
Path stop_path(const Path& x, double t);

/// Step path 1_{[t,T]} v: zero before the node at t, constant v from it on.
Path bump_direction(double t, const Vec& v, const TimeGrid& grid);

/// Piecewise-linear interpolation through one point per node. Operator norm 1
/// in the sup norm.
Path linear_interp(const TimeGrid& grid, const std::vector<Vec>& points);

/// sup_t e^{-lambda t} |x(t)|: the norm that makes the solution map a
/// contraction. Satisfies e^{-lambda T} |x|_inf <= |x|_lambda <= |x|_inf.
double weighted_norm(const Path& x, double lambda);

double weighted_norm_diff(const Path& a, const Path& b, double lambda);
double sup_norm_diff(const Path& a, const Path& b);

/// Orthonormal bases for the state space H = R^N and the noise space U = R^M.
/// Default identity columns.
struct BasisSpec {
    std::size_t dim_h = 1;
    std::size_t dim_u = 1;
    Matrix basis_h;  // N x N, columns e_n
    Matrix basis_u;  // M x M, columns e'_m

    BasisSpec() : BasisSpec(1, 1) {}
    BasisSpec(std::size_t n, std::size_t m);
    BasisSpec(std::size_t n, std::size_t m, Matrix bh, Matrix bu);

    Vec noise_basis_vector(std::size_t m) const { return basis_u.column(m); }
};

}  // namespace funcito
