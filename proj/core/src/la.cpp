#include "funcito/la.hpp"

#include <algorithm>
#include <cmath>

namespace funcito {

Vec solve_dense(Matrix a, Vec b) {
    if (a.rows != a.cols || b.size() != a.rows) throw std::invalid_argument("solve_dense: shape mismatch");
    const std::size_t n = a.rows;
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(a(i, k)) > best) {
                best = std::abs(a(i, k));
                piv = i;
            }
        }
        if (best == 0.0) throw std::runtime_error("solve_dense: singular matrix");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            a(i, k) = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    Vec x(n, 0.0);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= a(ii, j) * x[j];
        x[ii] = s / a(ii, ii);
    }
    return x;
}

Matrix orthonormalize_columns(const Matrix& a) {
    Matrix q = a;
    for (std::size_t j = 0; j < q.cols; ++j) {
        for (std::size_t prev = 0; prev < j; ++prev) {
            double proj = 0.0;
            for (std::size_t i = 0; i < q.rows; ++i) proj += q(i, j) * q(i, prev);
            for (std::size_t i = 0; i < q.rows; ++i) q(i, j) -= proj * q(i, prev);
        }
        double nrm = 0.0;
        for (std::size_t i = 0; i < q.rows; ++i) nrm += q(i, j) * q(i, j);
        nrm = std::sqrt(nrm);
        if (nrm < 1e-12) throw std::runtime_error("orthonormalize_columns: dependent columns");
        for (std::size_t i = 0; i < q.rows; ++i) q(i, j) /= nrm;
    }
    return q;
}

}  // namespace funcito
