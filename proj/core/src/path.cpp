#include "funcito/path.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace funcito {

Path::Path(TimeGrid grid, std::size_t dim, std::vector<double> values, PathKind kind)
    : grid_(grid), dim_(dim), kind_(kind), stop_node_(grid.n_steps()) {
    if (dim == 0) throw std::invalid_argument("Path: dim must be >= 1");
    if (values.size() != grid.n_nodes() * dim)
        throw std::invalid_argument("Path: expected one value per node (got " +
                                    std::to_string(values.size()) + ", want " +
                                    std::to_string(grid.n_nodes() * dim) + ")");
    if (!all_finite(values)) throw std::invalid_argument("Path: non-finite value");
    data_ = std::make_shared<const std::vector<double>>(std::move(values));
}

Path Path::constant(const TimeGrid& grid, const Vec& value, PathKind kind) {
    std::vector<double> vals(grid.n_nodes() * value.size());
    for (std::size_t k = 0; k < grid.n_nodes(); ++k)
        std::copy(value.begin(), value.end(), vals.begin() + k * value.size());
    return Path(grid, value.size(), std::move(vals), kind);
}

Path Path::zero(const TimeGrid& grid, std::size_t dim, PathKind kind) {
    return Path(grid, dim, std::vector<double>(grid.n_nodes() * dim, 0.0), kind);
}

Vec Path::eval(double t) const {
    Vec out(dim_);
    const double dt = grid_.dt();
    const double pos = std::min(std::max(t / dt, 0.0), static_cast<double>(grid_.n_steps()));
    const auto lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    const auto a = node(lo);
    if (frac <= 0.0 || kind_ == PathKind::Step) {
        std::copy(a.begin(), a.end(), out.begin());
        return out;
    }
    const auto b = node(std::min(lo + 1, grid_.n_steps()));
    for (std::size_t i = 0; i < dim_; ++i) out[i] = (1.0 - frac) * a[i] + frac * b[i];
    return out;
}

double Path::eval_scalar(double t, std::size_t i) const { return eval(t)[i]; }

double Path::sup_norm() const {
    double m = 0.0;
    for (std::size_t k = 0; k < n_nodes(); ++k) m = std::max(m, norm2(node(k)));
    return m;
}

std::vector<double> Path::dense_values() const {
    std::vector<double> out(n_nodes() * dim_);
    for (std::size_t k = 0; k < n_nodes(); ++k) {
        const auto v = node(k);
        std::copy(v.begin(), v.end(), out.begin() + k * dim_);
    }
    return out;
}

Path Path::stopped_at_node(std::size_t k) const {
    Path p = *this;
    p.stop_node_ = std::min(stop_node_, std::min(k, grid_.n_steps()));
    return p;
}

Path Path::stopped(double t) const { return stopped_at_node(grid_.snap_index(t)); }

Path Path::frozen_after(double tau) const {
    if (tau < 0.0) tau = 0.0;
    const double dt = grid_.dt();
    const auto keep = static_cast<std::size_t>(std::floor(tau / dt + 1e-12));
    if (keep >= grid_.n_steps()) return *this;
    const Vec frozen = eval(tau);
    std::vector<double> vals = dense_values();
    for (std::size_t k = keep + 1; k < n_nodes(); ++k)
        std::copy(frozen.begin(), frozen.end(), vals.begin() + k * dim_);
    return Path(grid_, dim_, std::move(vals), kind_);
}

Path Path::add_scaled(const Path& other, double c) const {
    if (!(other.grid_ == grid_) || other.dim_ != dim_)
        throw std::invalid_argument("Path::add_scaled: incompatible paths");
    std::vector<double> vals(n_nodes() * dim_);
    for (std::size_t k = 0; k < n_nodes(); ++k) {
        const auto a = node(k);
        const auto b = other.node(k);
        for (std::size_t i = 0; i < dim_; ++i) vals[k * dim_ + i] = a[i] + c * b[i];
    }
    const PathKind kind = (kind_ == PathKind::Step || other.kind_ == PathKind::Step)
                              ? PathKind::Step
                              : PathKind::ContinuousSample;
    return Path(grid_, dim_, std::move(vals), kind);
}

Path Path::sampled_on(const TimeGrid& other) const {
    if (other == grid_) return *this;
    if (other.horizon() != grid_.horizon())
        throw std::invalid_argument("Path::sampled_on: horizons differ");
    std::vector<double> vals(other.n_nodes() * dim_);
    for (std::size_t k = 0; k < other.n_nodes(); ++k) {
        const Vec v = eval(other.node(k));
        std::copy(v.begin(), v.end(), vals.begin() + k * dim_);
    }
    return Path(other, dim_, std::move(vals), kind_);
}

Path Path::with_kind(PathKind kind) const {
    Path p = *this;
    p.kind_ = kind;
    return p;
}

Path stop_path(const Path& x, double t) { return x.stopped(t); }

Path detail_borrowed_view(const TimeGrid& grid, std::size_t dim, const std::vector<double>* buf,
                          PathKind kind, std::size_t stop_node) {
    Path p;
    p.grid_ = grid;
    p.dim_ = dim;
    p.kind_ = kind;
    p.data_ = std::shared_ptr<const std::vector<double>>(buf, [](const std::vector<double>*) {});
    p.stop_node_ = std::min(stop_node, grid.n_steps());
    return p;
}

Path bump_direction(double t, const Vec& v, const TimeGrid& grid) {
    const std::size_t k0 = grid.snap_index(t);
    std::vector<double> vals(grid.n_nodes() * v.size(), 0.0);
    for (std::size_t k = k0; k < grid.n_nodes(); ++k)
        std::copy(v.begin(), v.end(), vals.begin() + k * v.size());
    return Path(grid, v.size(), std::move(vals), PathKind::Step);
}

Path linear_interp(const TimeGrid& grid, const std::vector<Vec>& points) {
    if (points.size() != grid.n_nodes())
        throw std::invalid_argument("linear_interp: need one point per node (got " +
                                    std::to_string(points.size()) + ", want " +
                                    std::to_string(grid.n_nodes()) + ")");
    const std::size_t dim = points.front().size();
    std::vector<double> vals(grid.n_nodes() * dim);
    for (std::size_t k = 0; k < points.size(); ++k) {
        if (points[k].size() != dim) throw std::invalid_argument("linear_interp: ragged points");
        std::copy(points[k].begin(), points[k].end(), vals.begin() + k * dim);
    }
    return Path(grid, dim, std::move(vals), PathKind::ContinuousSample);
}

double weighted_norm(const Path& x, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("weighted_norm: lambda must be > 0");
    double m = 0.0;
    for (std::size_t k = 0; k < x.n_nodes(); ++k)
        m = std::max(m, std::exp(-lambda * x.grid().node(k)) * norm2(x.node(k)));
    return m;
}

double weighted_norm_diff(const Path& a, const Path& b, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("weighted_norm_diff: lambda must be > 0");
    double m = 0.0;
    for (std::size_t k = 0; k < a.n_nodes(); ++k) {
        const auto va = a.node(k);
        const auto vb = b.node(k);
        double s = 0.0;
        for (std::size_t i = 0; i < va.size(); ++i) s += (va[i] - vb[i]) * (va[i] - vb[i]);
        m = std::max(m, std::exp(-lambda * a.grid().node(k)) * std::sqrt(s));
    }
    return m;
}

double sup_norm_diff(const Path& a, const Path& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.n_nodes(); ++k) {
        const auto va = a.node(k);
        const auto vb = b.node(k);
        double s = 0.0;
        for (std::size_t i = 0; i < va.size(); ++i) s += (va[i] - vb[i]) * (va[i] - vb[i]);
        m = std::max(m, std::sqrt(s));
    }
    return m;
}

namespace {

void check_orthonormal(const Matrix& b, const char* which) {
    for (std::size_t i = 0; i < b.cols; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < b.rows; ++r) s += b(r, i) * b(r, j);
            const double want = (i == j) ? 1.0 : 0.0;
            if (std::abs(s - want) > 1e-12)
                throw std::invalid_argument(std::string("BasisSpec: ") + which +
                                            " basis is not orthonormal to 1e-12");
        }
    }
}

}  // namespace

BasisSpec::BasisSpec(std::size_t n, std::size_t m)
    : dim_h(n), dim_u(m), basis_h(Matrix::identity(n)), basis_u(Matrix::identity(m)) {}

BasisSpec::BasisSpec(std::size_t n, std::size_t m, Matrix bh, Matrix bu)
    : dim_h(n), dim_u(m), basis_h(std::move(bh)), basis_u(std::move(bu)) {
    if (basis_h.rows != n || basis_h.cols != n || basis_u.rows != m || basis_u.cols != m)
        throw std::invalid_argument("BasisSpec: basis shape mismatch");
    check_orthonormal(basis_h, "H");
    check_orthonormal(basis_u, "U");
}

}  // namespace funcito
