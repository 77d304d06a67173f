#include "funcito/catalog.hpp"

#include <cmath>
#include <stdexcept>

namespace funcito {

namespace {

Vec coeffs_from(const Json& params, std::size_t dim) {
    Vec c(dim, 0.0);
    c[0] = 1.0;
    if (params.contains("coeffs")) {
        const auto& arr = params.at("coeffs");
        if (!arr.is_array() || arr.size() != dim)
            throw std::invalid_argument("catalog: coeffs must be an array of length dim");
        for (std::size_t i = 0; i < dim; ++i) c[i] = arr[i].get<double>();
    }
    return c;
}

/// State maps g: R^N -> R shared by the terminal/average/cylinder families.
struct StateMap {
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> grad;
    std::function<double(const Vec&, const Vec&, const Vec&)> hess;  // (y, v, w)
};

StateMap make_state_map(const std::string& form, const Vec& c) {
    StateMap g;
    if (form == "linear") {
        g.value = [c](const Vec& y) { return dot(c, y); };
        g.grad = [c](const Vec&) { return c; };
        g.hess = [](const Vec&, const Vec&, const Vec&) { return 0.0; };
    } else if (form == "quadratic") {
        g.value = [c](const Vec& y) {
            double s = 0.0;
            for (std::size_t i = 0; i < y.size(); ++i) s += c[i] * y[i] * y[i];
            return s;
        };
        g.grad = [c](const Vec& y) {
            Vec out(y.size());
            for (std::size_t i = 0; i < y.size(); ++i) out[i] = 2.0 * c[i] * y[i];
            return out;
        };
        g.hess = [c](const Vec&, const Vec& v, const Vec& w) {
            double s = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) s += 2.0 * c[i] * v[i] * w[i];
            return s;
        };
    } else if (form == "sin") {
        g.value = [c](const Vec& y) { return std::sin(dot(c, y)); };
        g.grad = [c](const Vec& y) { return scaled(c, std::cos(dot(c, y))); };
        g.hess = [c](const Vec& y, const Vec& v, const Vec& w) {
            return -std::sin(dot(c, y)) * dot(c, v) * dot(c, w);
        };
    } else {
        throw std::invalid_argument("catalog: unknown form '" + form + "'");
    }
    return g;
}

/// Left-rule quadrature of <c, x(s)> gamma(t - s) over [0, t], including the
/// partial cell up to an off-grid t (left-constant on the partial cell).
double running_quadrature(const Path& x, double t, const Vec& c,
                          const std::function<double(double)>& gamma) {
    const TimeGrid& grid = x.grid();
    const double dt = grid.dt();
    double acc = 0.0;
    std::size_t j = 0;
    while (j < grid.n_steps() && grid.node(j + 1) <= t + 1e-12 * grid.horizon()) {
        acc += dot(c, x.node(j)) * gamma(t - grid.node(j)) * dt;
        ++j;
    }
    const double rest = t - grid.node(j);
    if (rest > 1e-12 * grid.horizon() && j < grid.n_nodes())
        acc += dot(c, x.node(j)) * gamma(t - grid.node(j)) * rest;
    return acc;
}

Functional make_cylinder(const Json& params, std::size_t dim) {
    const std::string form = params.value("form", "linear");
    const Vec c = coeffs_from(params, dim);
    Functional u;
    u.name = "cylinder/" + form;
    if (form == "sin_exp") {
        u.value = [c](double t, const Path& x) { return std::sin(dot(c, x.eval(t))) * std::exp(-t); };
        u.vertical = [c](double t, const Path& x, const Vec& v) {
            return std::cos(dot(c, x.eval(t))) * std::exp(-t) * dot(c, v);
        };
        u.second_vertical = [c](double t, const Path& x, const Vec& v, const Vec& w) {
            return -std::sin(dot(c, x.eval(t))) * std::exp(-t) * dot(c, v) * dot(c, w);
        };
        u.left_time = [c](double t, const Path& x) {
            return -std::sin(dot(c, x.eval(t))) * std::exp(-t);
        };
        u.bound_first = norm2(c);
        u.bound_second = norm2(c) * norm2(c);
    } else {
        const StateMap g = make_state_map(form, c);
        u.value = [g](double t, const Path& x) { return g.value(x.eval(t)); };
        u.vertical = [g](double t, const Path& x, const Vec& v) { return dot(g.grad(x.eval(t)), v); };
        u.second_vertical = [g](double t, const Path& x, const Vec& v, const Vec& w) {
            return g.hess(x.eval(t), v, w);
        };
        u.left_time = [](double, const Path&) { return 0.0; };
        if (form == "linear") {
            u.bound_first = norm2(c);
            u.bound_second = 0.0;
        }
    }
    return u;
}

Functional make_running_integral(const Json& params, std::size_t dim) {
    const Vec c = coeffs_from(params, dim);
    const double rho = params.value("rho", 1.0);
    const auto gamma = [rho](double r) { return std::exp(-rho * r); };
    const auto dgamma = [rho](double r) { return -rho * std::exp(-rho * r); };

    Functional u;
    u.name = "running_integral";
    u.value = [c, gamma](double t, const Path& x) { return running_quadrature(x, t, c, gamma); };
    // The bump 1_{[t,T]} v only overlaps [0,t] on a null set, so the vertical
    // derivatives vanish; the left-rule quadrature agrees exactly.
    u.vertical = [](double, const Path&, const Vec&) { return 0.0; };
    u.second_vertical = [](double, const Path&, const Vec&, const Vec&) { return 0.0; };
    u.left_time = [c, gamma, dgamma](double t, const Path& x) {
        return dot(c, x.eval(t)) * gamma(0.0) + running_quadrature(x, t, c, dgamma);
    };
    return u;
}

Functional make_terminal(const Json& params, std::size_t dim) {
    const std::string form = params.value("form", "linear");
    const Vec c = coeffs_from(params, dim);
    const StateMap g = make_state_map(form, c);
    Functional f;
    f.name = "terminal/" + form;
    f.value = [g](double, const Path& x) {
        return g.value(Vec(x.node(x.grid().n_steps()).begin(), x.node(x.grid().n_steps()).end()));
    };
    f.vertical = [g](double, const Path& x, const Vec& v) {
        const auto xt = x.node(x.grid().n_steps());
        return dot(g.grad(Vec(xt.begin(), xt.end())), v);
    };
    f.second_vertical = [g](double, const Path& x, const Vec& v, const Vec& w) {
        const auto xt = x.node(x.grid().n_steps());
        return g.hess(Vec(xt.begin(), xt.end()), v, w);
    };
    f.path_gradient = [g](const Path& x, const Path& p) {
        const std::size_t last = x.grid().n_steps();
        const auto xt = x.node(last);
        const auto pt = p.node(last);
        return dot(g.grad(Vec(xt.begin(), xt.end())), pt);
    };
    return f;
}

Vec left_rule_integral(const Path& x) {
    const TimeGrid& grid = x.grid();
    Vec acc(x.dim(), 0.0);
    for (std::size_t j = 0; j < grid.n_steps(); ++j) axpy(grid.dt(), x.node(j), acc);
    return acc;
}

Functional make_average(const Json& params, std::size_t dim) {
    const std::string form = params.value("form", "linear");
    const Vec c = coeffs_from(params, dim);
    const StateMap g = make_state_map(form, c);
    Functional f;
    f.name = "average/" + form;
    f.value = [g](double, const Path& x) { return g.value(left_rule_integral(x)); };
    f.vertical = [g](double t, const Path& x, const Vec& v) {
        // Bumping from t on shifts the left-rule integral by (T - t) v.
        const double w = x.grid().horizon() - t;
        return dot(g.grad(left_rule_integral(x)), scaled(v, w));
    };
    f.second_vertical = [g](double t, const Path& x, const Vec& v, const Vec& w) {
        const double s = x.grid().horizon() - t;
        return g.hess(left_rule_integral(x), scaled(v, s), scaled(w, s));
    };
    f.path_gradient = [g](const Path& x, const Path& p) {
        return dot(g.grad(left_rule_integral(x)), left_rule_integral(p));
    };
    return f;
}

void strip_callbacks(Functional& u) {
    u.vertical = nullptr;
    u.second_vertical = nullptr;
    u.left_time = nullptr;
}

}  // namespace

Functional make_functional(const std::string& name, const Json& params, std::size_t dim) {
    Functional u;
    if (name == "cylinder")
        u = make_cylinder(params, dim);
    else if (name == "running_integral")
        u = make_running_integral(params, dim);
    else if (name == "terminal")
        u = make_terminal(params, dim);
    else if (name == "average")
        u = make_average(params, dim);
    else
        throw std::invalid_argument("catalog: unknown functional '" + name + "'");
    if (!params.value("analytic", true)) strip_callbacks(u);
    return u;
}

ConvolutionDrift make_drift(const std::string& name, const Json& params, RadonMeasure measure,
                            std::size_t dim) {
    ConvolutionDrift d;
    d.dim = dim;
    d.measure = std::move(measure);
    if (name == "linear" || name == "delay_linear") {
        const double kappa = params.value("kappa", 1.0);
        Vec offset(dim, 0.0);
        if (params.contains("offset")) {
            const auto& arr = params.at("offset");
            for (std::size_t i = 0; i < dim && i < arr.size(); ++i) offset[i] = arr[i].get<double>();
        }
        d.b = [kappa, offset](double, const Vec& y) {
            Vec out(y.size());
            for (std::size_t i = 0; i < y.size(); ++i) out[i] = -kappa * y[i] + offset[i];
            return out;
        };
        d.grad = [kappa](double, const Vec& y) {
            Matrix m(y.size(), y.size());
            for (std::size_t i = 0; i < y.size(); ++i) m(i, i) = -kappa;
            return m;
        };
        d.hess = [dim](double, const Vec&, const Vec&, const Vec&) { return Vec(dim, 0.0); };
        d.lipschitz = std::abs(kappa);
        d.grad_bound = std::abs(kappa);
        d.hess_bound = 0.0;
    } else if (name == "smooth_nonlinear") {
        const double scale = params.value("scale", 1.0);
        d.b = [scale](double, const Vec& y) {
            Vec out(y.size());
            for (std::size_t i = 0; i < y.size(); ++i) out[i] = scale * std::tanh(y[i]);
            return out;
        };
        d.grad = [scale](double, const Vec& y) {
            Matrix m(y.size(), y.size());
            for (std::size_t i = 0; i < y.size(); ++i) {
                const double th = std::tanh(y[i]);
                m(i, i) = scale * (1.0 - th * th);
            }
            return m;
        };
        d.hess = [scale](double, const Vec& y, const Vec& v, const Vec& w) {
            Vec out(y.size());
            for (std::size_t i = 0; i < y.size(); ++i) {
                const double th = std::tanh(y[i]);
                out[i] = scale * (-2.0 * th * (1.0 - th * th)) * v[i] * w[i];
            }
            return out;
        };
        d.lipschitz = std::abs(scale);
        d.grad_bound = std::abs(scale);
        d.hess_bound = 0.7698 * std::abs(scale);
    } else {
        throw std::invalid_argument("catalog: unknown drift '" + name + "'");
    }
    return d;
}

Functional make_analytic_phi(const std::string& name, const Json& params, std::size_t dim) {
    const Vec c = coeffs_from(params, dim);
    Functional phi;
    if (name == "ou_terminal") {
        const double kappa = params.value("kappa", 1.0);
        phi.name = "phi/ou_terminal";
        phi.value = [c, kappa](double t, const Path& x) {
            return dot(c, x.eval(t)) * std::exp(-kappa * (x.grid().horizon() - t));
        };
        phi.vertical = [c, kappa](double t, const Path& x, const Vec& v) {
            return dot(c, v) * std::exp(-kappa * (x.grid().horizon() - t));
        };
        phi.second_vertical = [](double, const Path&, const Vec&, const Vec&) { return 0.0; };
        phi.left_time = [c, kappa](double t, const Path& x) {
            return kappa * dot(c, x.eval(t)) * std::exp(-kappa * (x.grid().horizon() - t));
        };
    } else if (name == "ou_terminal_scheme") {
        // Value function of the explicit scheme itself: the discrete
        // conditional expectation uses (1 - kappa dt)^{n-k} rather than the
        // continuum discount, which makes the discrete martingale residual
        // exactly mean-zero at any step size.
        const double kappa = params.value("kappa", 1.0);
        phi.name = "phi/ou_terminal_scheme";
        phi.grid_times_only = true;
        const auto discount = [kappa](double t, const Path& x) {
            const TimeGrid& g = x.grid();
            const std::size_t k = g.nearest_index(t);
            return std::pow(1.0 - kappa * g.dt(),
                            static_cast<double>(g.n_steps() - k));
        };
        phi.value = [c, discount](double t, const Path& x) {
            return dot(c, x.eval(t)) * discount(t, x);
        };
        phi.vertical = [c, discount](double t, const Path& x, const Vec& v) {
            return dot(c, v) * discount(t, x);
        };
        phi.second_vertical = [](double, const Path&, const Vec&, const Vec&) { return 0.0; };
    } else if (name == "zero_drift_terminal") {
        phi.name = "phi/zero_drift_terminal";
        phi.value = [c](double t, const Path& x) { return dot(c, x.eval(t)); };
        phi.vertical = [c](double, const Path&, const Vec& v) { return dot(c, v); };
        phi.second_vertical = [](double, const Path&, const Vec&, const Vec&) { return 0.0; };
        phi.left_time = [](double, const Path&) { return 0.0; };
    } else if (name == "zero_drift_average") {
        phi.name = "phi/zero_drift_average";
        phi.value = [c](double t, const Path& x) {
            const auto id = [](double) { return 1.0; };
            return running_quadrature(x, t, c, id) +
                   dot(c, x.eval(t)) * (x.grid().horizon() - t);
        };
        phi.vertical = [c](double t, const Path& x, const Vec& v) {
            return dot(c, v) * (x.grid().horizon() - t);
        };
        phi.second_vertical = [](double, const Path&, const Vec&, const Vec&) { return 0.0; };
        phi.left_time = [](double, const Path&) { return 0.0; };
    } else {
        throw std::invalid_argument("catalog: unknown analytic phi '" + name + "'");
    }
    return phi;
}

bool functional_exists(const std::string& name) {
    return name == "cylinder" || name == "running_integral" || name == "terminal" ||
           name == "average";
}

bool drift_exists(const std::string& name) {
    return name == "linear" || name == "delay_linear" || name == "smooth_nonlinear";
}

bool analytic_phi_exists(const std::string& name) {
    return name == "ou_terminal" || name == "ou_terminal_scheme" ||
           name == "zero_drift_terminal" || name == "zero_drift_average";
}

std::string catalog_text() {
    return
        "functionals:\n"
        "  average           f(x) = g(int_0^T x ds); params: form=linear|quadratic|sin,\n"
        "                    coeffs=[..] (default e_1), analytic=true|false\n"
        "  cylinder          u(t,x) = g(t, x(t)); params: form=linear|quadratic|sin_exp,\n"
        "                    coeffs, analytic\n"
        "  running_integral  u(t,x) = int_0^t <c,x(s)> exp(-rho (t-s)) ds; params: coeffs,\n"
        "                    rho, analytic\n"
        "  terminal          f(x) = g(x(T)); params: form=linear|quadratic|sin, coeffs,\n"
        "                    analytic\n"
        "drifts:\n"
        "  delay_linear      alias of linear; pair it with a delayed measure\n"
        "  linear            b(t,y) = -kappa y + offset; params: kappa, offset=[..]\n"
        "  smooth_nonlinear  b(t,y)_i = scale tanh(y_i); params: scale\n"
        "analytic_phi:\n"
        "  ou_terminal          phi(t,x) = <c,x(t)> e^{-kappa (T-t)}; params: kappa, coeffs\n"
        "  ou_terminal_scheme   scheme-consistent discount (1-kappa dt)^{n-k}; params: kappa,\n"
        "                       coeffs (use for martingale tests at fixed dt)\n"
        "  zero_drift_average   phi(t,x) = int_0^t <c,x> ds + <c,x(t)>(T-t); params: coeffs\n"
        "  zero_drift_terminal  phi(t,x) = <c,x(t)>; params: coeffs\n"
        "checks:\n"
        "  clark_ocone       params: t_hat, n_paths, phi (analytic_phi name) or estimated\n"
        "  contraction       params: lambdas=[..], n_pairs, tol_factor\n"
        "  convolution_phi   params: t_hat, n_paths, n_paths_phi, grad_rel_tol\n"
        "  feynman_kac       params: t, n_paths, expect_value, tol_abs, tol_stderr_mult\n"
        "  flow              params: t, s\n"
        "  ito_formula       params: n_trajectories, tol\n"
        "  kolmogorov        params: t, phi (analytic_phi name) or estimated, n_paths, tol\n"
        "  sensitivities     params: t, n_fd_tol, dense_tol\n"
        "  tower             params: t_prime, t, n_outer, n_inner\n";
}

}  // namespace funcito
