#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace funcito {

/// Dense column-major-free small vector/matrix helpers. State vectors live in
/// R^N with N small (1..8 typical), so plain std::vector<double> is the value
/// type and these free functions do the arithmetic.
using Vec = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline Vec add(std::span<const double> a, std::span<const double> b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec sub(std::span<const double> a, std::span<const double> b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec scaled(std::span<const double> a, double c) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
    return r;
}

inline void axpy(double c, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

inline bool all_finite(std::span<const double> a) {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

/// Row-major dense matrix, sized for diffusion operators R^M -> R^N.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    Vec apply(std::span<const double> x) const {
        if (x.size() != cols) throw std::invalid_argument("Matrix::apply: size mismatch");
        Vec y(rows, 0.0);
        for (std::size_t i = 0; i < rows; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < cols; ++j) s += data[i * cols + j] * x[j];
            y[i] = s;
        }
        return y;
    }

    Vec column(std::size_t j) const {
        Vec c(rows);
        for (std::size_t i = 0; i < rows; ++i) c[i] = data[i * cols + j];
        return c;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (double v : data) s += v * v;
        return std::sqrt(s);
    }
};

/// Solves A x = b in place by partial-pivot Gaussian elimination. Used by
/// test oracles and small dense cross-checks; not a performance path.
Vec solve_dense(Matrix a, Vec b);

/// Gram-Schmidt orthonormalization of the columns of `a`; throws if the
/// columns are numerically dependent.
Matrix orthonormalize_columns(const Matrix& a);

}  // namespace funcito
