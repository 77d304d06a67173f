#pragma once

#include <stdexcept>
#include <vector>

#include "funcito/coefficients.hpp"
#include "funcito/noise.hpp"
#include "funcito/path.hpp"

namespace funcito {

/// Raised when an integration or fixed-point solve leaves the numerical
/// domain (divergence, non-convergence).
class SolveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An Ito process X_t = Y_{that ^ t} + int_that^{that v t} b_s ds
///                    + int_that^{that v t} Phi_s dW_s.
/// The integrands are either raw per-step arrays (set drift_steps /
/// diffusion_steps) or induced from a CoefficientSet along the solution
/// (leave them empty and use euler_maruyama).
struct ItoProcessSpec {
    double start_time = 0.0;
    Path initial;
    std::vector<Vec> drift_steps;
    std::vector<Matrix> diffusion_steps;
};

/// Explicit integration with exogenous per-step integrands.
Path integrate_ito_process(const ItoProcessSpec& spec, const NoiseBundle& noise);

/// Explicit Euler-Maruyama with left-point coefficient evaluation. At step k
/// the coefficients see a view of the solution stopped at t_k, so they cannot
/// read the future even if mis-written. Aborts with SolveError when the state
/// norm exceeds 1e6 (1 + |Y|_inf).
Path euler_maruyama(const ItoProcessSpec& spec, const CoefficientSet& coeffs,
                    const NoiseBundle& noise);

/// The per-step coefficient values the scheme used along a realized solution.
struct RealizedCoefficients {
    std::vector<Vec> drift;
    std::vector<Matrix> diffusion;
};

RealizedCoefficients realized_coefficients(const Path& x, const CoefficientSet& coeffs);

/// The stopped-coordinate family over a coarse partition: entry i is X
/// stopped at the (i+1)-th coarse node, and the final entry is X itself.
std::vector<Path> stopped_coordinates(const Path& x, const TimeGrid& coarse);

/// The coarse-slot lift of an integrand value b_s: slot i carries b_s while
/// s < t_{i+2} (half-open), and the final slot uses the closed interval.
/// Interpolating the slots over the partition recovers 1_{[s,T]} b_s in the
/// fine-mesh limit.
std::vector<Vec> partition_drift_slots(const Vec& b_s, double s, const TimeGrid& coarse);
std::vector<Matrix> partition_diffusion_slots(const Matrix& phi_s, double s,
                                              const TimeGrid& coarse);

/// Sup-norm gap between the solution from (t, x) and the solution restarted
/// at s >= t from the first one, with the same noise. The explicit scheme
/// recomputes identical steps, so this is exactly zero.
double flow_residual(double t, const Path& x, double s, const CoefficientSet& coeffs,
                     const NoiseBundle& noise);

}  // namespace funcito
