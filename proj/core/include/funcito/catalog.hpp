#pragma once

#include <cstddef>
#include <string>

#include <json.hpp>

#include "funcito/functional.hpp"
#include "funcito/pathwise.hpp"

namespace funcito {

using Json = nlohmann::json;

/// Built-in path functionals selectable by name:
///   cylinder          u(t,x) = g(t, x(t));      forms: linear, quadratic, sin_exp
///   running_integral  u(t,x) = int_0^t <c, x(s)> gamma(t-s) ds, gamma = exp(-rho r)
///   terminal          f(x)   = g(x(T));         forms: linear, quadratic, sin
///   average           f(x)   = g(int_0^T x ds); forms: linear, quadratic, sin
/// Common params: "coeffs" (defaults to e_1), "analytic" (default true; false
/// strips the derivative callbacks so finite differences take over).
Functional make_functional(const std::string& name, const Json& params, std::size_t dim);

/// Outer drifts for the convolution dynamics:
///   linear            b(t,y) = -kappa y + offset
///   delay_linear      alias of linear (the delay lives in the measure)
///   smooth_nonlinear  b(t,y)_i = scale tanh(y_i)
ConvolutionDrift make_drift(const std::string& name, const Json& params, RadonMeasure measure,
                            std::size_t dim);

/// Closed-form phi oracles for checks that need an analytic value function:
///   ou_terminal          phi(t,x) = <c, x(t)> e^{-kappa (T-t)}
///   zero_drift_terminal  phi(t,x) = <c, x(t)>
///   zero_drift_average   phi(t,x) = int_0^t <c, x> ds + <c, x(t)> (T-t)
Functional make_analytic_phi(const std::string& name, const Json& params, std::size_t dim);

/// Sorted, stable listing of functionals, drifts, analytic phis, and checks
/// with their parameters.
std::string catalog_text();

bool functional_exists(const std::string& name);
bool drift_exists(const std::string& name);
bool analytic_phi_exists(const std::string& name);

}  // namespace funcito
