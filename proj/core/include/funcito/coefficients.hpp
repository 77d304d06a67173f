#pragma once

#include <functional>

#include "funcito/la.hpp"
#include "funcito/path.hpp"

namespace funcito {

/// SDE coefficients dX = b(t,X) dt + Phi(t,X) dW on H = R^N with U = R^M
/// noise. Both callbacks must be non-anticipative: the integrator hands them
/// stopped views, so they can only read the path up to the current time, and
/// they must not retain the Path argument beyond the call.
///
/// The declared constants are the bounds the well-posedness assumptions ask
/// for (Lipschitz/growth M for b and Phi; outer-drift Lipschitz N and
/// derivative bounds N1, N2 for convolution drifts). They are metadata used
/// by contraction estimates and assumption probes, not enforced pointwise.
struct CoefficientSet {
    std::size_t dim_h = 1;
    std::size_t dim_u = 1;
    std::function<Vec(double, const Path&)> drift;        // b(t, x) in R^N
    std::function<Matrix(double, const Path&)> diffusion; // Phi(t, x), N x M

    double growth_lipschitz = 1.0;  // M
    double drift_lipschitz = 1.0;   // N
    double grad_bound = 1.0;        // N1
    double hess_bound = 1.0;        // N2

    static CoefficientSet zero_drift_constant(const Matrix& b_matrix) {
        CoefficientSet c;
        c.dim_h = b_matrix.rows;
        c.dim_u = b_matrix.cols;
        c.drift = [n = b_matrix.rows](double, const Path&) { return Vec(n, 0.0); };
        c.diffusion = [b_matrix](double, const Path&) { return b_matrix; };
        return c;
    }
};

}  // namespace funcito
