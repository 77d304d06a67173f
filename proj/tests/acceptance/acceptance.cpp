// Acceptance suite: every numerical contract of the library, one pass/fail
// line per criterion, with the tolerances pinned in code. Exit status is the
// number of failed criteria.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "funcito/catalog.hpp"
#include "funcito/checks.hpp"
#include "funcito/config.hpp"
#include "funcito/rng.hpp"
#include "funcito/sensitivities.hpp"
#include "funcito/verification.hpp"

using namespace funcito;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& label, bool pass, const std::string& detail) {
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << "criterion " << criterion << ": " << label
              << "  (" << detail << ")\n";
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

ConvolutionDrift linear_drift(const TimeGrid&, double kappa, const RadonMeasure& mu) {
    return make_drift("linear", Json{{"kappa", kappa}}, mu, 1);
}

// ---------------------------------------------------------------------------
// 1. Contraction law: measured psi ratios below (1 - e^{-lambda T}) N |mu|_1
//    / lambda for lambda in {2, 5, 10} and mu in {delta_0, delta_{T/4},
//    Lebesgue}; Picard decay ratios below alpha * 1.05.
void criterion_1() {
    const TimeGrid grid(1.0, 128);
    const Path anchor = Path::constant(grid, {1.0});
    Matrix b_mat(1, 1);
    b_mat(0, 0) = 0.3;
    const Path wb = integrate_constant_noise(b_mat, sample_noise(grid, 1, 11, 0));

    bool pass = true;
    double worst_ratio = 0.0, worst_picard = 0.0;
    const std::vector<RadonMeasure> measures = {RadonMeasure::dirac(grid, 0.0),
                                                RadonMeasure::dirac(grid, 0.25),
                                                RadonMeasure::lebesgue(grid)};
    for (const RadonMeasure& mu : measures) {
        const ConvolutionDrift drift = linear_drift(grid, 1.0, mu);
        for (double lambda : {2.0, 5.0, 10.0}) {
            const ContractionProbe probe =
                probe_contraction(drift, anchor, wb, 0.0, lambda, 100, 17);
            pass = pass && probe.max_ratio <= probe.bound;
            pass = pass && probe.max_picard_ratio <= probe.bound * 1.05;
            worst_ratio = std::max(worst_ratio, probe.max_ratio / probe.bound);
            if (probe.bound > 0.0)
                worst_picard = std::max(worst_picard, probe.max_picard_ratio / probe.bound);
        }
    }
    report(1, "contraction law for psi in the lambda-weighted norm", pass,
           "max ratio/bound=" + fmt(worst_ratio) + ", max picard/alpha=" + fmt(worst_picard));
}

// ---------------------------------------------------------------------------
// 2. Markovian reduction: with mu = delta_0 the fixed-point solver and
//    Euler-Maruyama agree within 5 dt (1 + |x0|) on coupled noise, dt=1/256.
void criterion_2() {
    const TimeGrid grid(1.0, 256);
    const Path x0 = Path::constant(grid, {1.0});
    const ConvolutionDrift drift = linear_drift(grid, 1.0, RadonMeasure::dirac(grid, 0.0));
    Matrix b_mat(1, 1);
    b_mat(0, 0) = 0.3;
    const CoefficientSet coeffs = drift.to_coefficients(b_mat);

    double worst = 0.0;
    for (std::uint64_t stream = 0; stream < 5; ++stream) {
        const NoiseBundle noise = sample_noise(grid, 1, 23, stream);
        const Path pw = solve_sde_pathwise(0.0, x0, drift, b_mat, noise).solution;
        ItoProcessSpec spec;
        spec.initial = x0;
        const Path em = euler_maruyama(spec, coeffs, noise);
        worst = std::max(worst,
                         std::abs(pw.node(grid.n_steps())[0] - em.node(grid.n_steps())[0]));
    }
    const double tol = 5.0 * grid.dt() * (1.0 + x0.sup_norm());
    report(2, "Markovian reduction: pathwise solver vs Euler-Maruyama", worst <= tol,
           "max terminal gap=" + fmt(worst) + " <= " + fmt(tol));
}

// ---------------------------------------------------------------------------
// 3. OU closed form: Feynman-Kac with kappa=1, sigma=0.3, T=1, x0=1,
//    n_paths=1e5, dt=1/256 lands within 3 stderr + 0.01 of e^{-1}.
void criterion_3() {
    const TimeGrid grid(1.0, 256);
    const Path x0 = Path::constant(grid, {1.0});
    Matrix b_mat(1, 1);
    b_mat(0, 0) = 0.3;
    const CoefficientSet coeffs =
        linear_drift(grid, 1.0, RadonMeasure::dirac(grid, 0.0)).to_coefficients(b_mat);
    const Functional f = make_functional("cylinder", Json{{"form", "linear"}}, 1);
    const MCEstimate est = feynman_kac(0.0, x0, f, coeffs, 100000, 101);
    const double gap = std::abs(est.value - std::exp(-1.0));
    const double tol = 3.0 * est.std_error + 0.01;
    report(3, "OU closed-form mean via Feynman-Kac (1e5 paths)", gap <= tol,
           "value=" + fmt(est.value) + ", |gap|=" + fmt(gap) + " <= " + fmt(tol));
}

// ---------------------------------------------------------------------------
// 4. Ito formula: linear cylinder residual <= 1e-10 per path; smooth
//    cylinder terminal RMS residual decays with log-log slope >= 0.4 over
//    dt in {1/64, 1/128, 1/256, 1/512}.
void criterion_4() {
    const Functional linear = make_functional("cylinder", Json{{"form", "linear"}}, 1);
    const TimeGrid grid(1.0, 256);
    const Path x0 = Path::constant(grid, {0.7});
    Matrix b_mat(1, 1);
    b_mat(0, 0) = 0.3;
    const CoefficientSet coeffs =
        linear_drift(grid, 1.2, RadonMeasure::dirac(grid, 0.0)).to_coefficients(b_mat);

    double worst_linear = 0.0;
    for (std::uint64_t stream = 0; stream < 5; ++stream) {
        const ResidualReport rep =
            ito_residual(linear, 0.0, x0, coeffs, sample_noise(grid, 1, 31, stream));
        worst_linear = std::max(worst_linear, rep.max_abs);
    }
    report(4, "Ito formula, linear cylinder telescopes", worst_linear <= 1e-10,
           "max residual=" + fmt(worst_linear) + " <= 1e-10");

    const Functional smooth = make_functional("cylinder", Json{{"form", "sin_exp"}}, 1);
    std::vector<double> log_dt, log_rms;
    for (std::size_t steps : {64, 128, 256, 512}) {
        const TimeGrid g(1.0, steps);
        const Path x = Path::constant(g, {0.7});
        const CoefficientSet c =
            linear_drift(g, 1.0, RadonMeasure::dirac(g, 0.0)).to_coefficients(b_mat);
        double acc = 0.0;
        const std::size_t n_paths = 300;
        for (std::size_t i = 0; i < n_paths; ++i) {
            const ResidualReport rep =
                ito_residual(smooth, 0.0, x, c, sample_noise(g, 1, 37, i));
            acc += rep.statistic * rep.statistic;
        }
        log_dt.push_back(std::log(g.dt()));
        log_rms.push_back(std::log(std::sqrt(acc / n_paths)));
    }
    // Least-squares slope of log rms against log dt.
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < log_dt.size(); ++i) {
        mx += log_dt[i];
        my += log_rms[i];
    }
    mx /= static_cast<double>(log_dt.size());
    my /= static_cast<double>(log_dt.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < log_dt.size(); ++i) {
        num += (log_dt[i] - mx) * (log_rms[i] - my);
        den += (log_dt[i] - mx) * (log_dt[i] - mx);
    }
    const double slope = num / den;
    report(4, "Ito formula, smooth cylinder refinement slope", slope >= 0.4,
           "slope=" + fmt(slope) + " >= 0.4");
}

// ---------------------------------------------------------------------------
// 5. Kolmogorov equation: analytic value functions give residual <= 1e-6
//    through the callbacks; the Monte Carlo estimator stays within its
//    3-sigma + C dt budget.
void criterion_5() {
    const TimeGrid grid(1.0, 128);
    const Path x0 = Path::constant(grid, {1.0});
    Matrix b_mat(1, 1);
    b_mat(0, 0) = 0.3;

    const CoefficientSet ou =
        linear_drift(grid, 1.0, RadonMeasure::dirac(grid, 0.0)).to_coefficients(b_mat);
    const Functional phi_ou = make_analytic_phi("ou_terminal", Json{{"kappa", 1.0}}, 1);
    const ResidualReport rep_ou = kolmogorov_residual_analytic(phi_ou, ou, 0.5, x0, 1e-6);

    const CoefficientSet zd =
        linear_drift(grid, 0.0, RadonMeasure::dirac(grid, 0.0)).to_coefficients(b_mat);
    const Functional phi_avg = make_analytic_phi("zero_drift_average", Json::object(), 1);
    const ResidualReport rep_avg = kolmogorov_residual_analytic(phi_avg, zd, 0.5, x0, 1e-6);

    report(5, "Kolmogorov residual with analytic value functions",
           rep_ou.pass && rep_avg.pass,
           "ou=" + fmt(rep_ou.statistic) + ", average=" + fmt(rep_avg.statistic) + " <= 1e-6");

    const Functional f_term = make_functional("cylinder", Json{{"form", "linear"}}, 1);
    KolmogorovOptions opts;
    opts.n_paths = 6000;
    opts.seed = 41;
    const ResidualReport mc_ou = kolmogorov_residual(f_term, ou, 0.5, x0, opts);
    const Functional f_avg = make_functional("average", Json{{"form", "linear"}}, 1);
    opts.seed = 43;
    const ResidualReport mc_avg = kolmogorov_residual(f_avg, zd, 0.5, x0, opts);
    report(5, "Kolmogorov residual with the estimated value function",
           mc_ou.pass && mc_avg.pass,
           "ou=" + fmt(mc_ou.statistic) + "<=" + fmt(mc_ou.budget) + ", average=" +
               fmt(mc_avg.statistic) + "<=" + fmt(mc_avg.budget));
}

// ---------------------------------------------------------------------------
// 6. Clark-Ocone for the zero-drift average functional: integrand matches
//    sigma (T - s) nodewise within 1e-6; terminal ensemble mean within
//    3 stderr over 1e4 paths; RMS halves (within 30%) under coupled
//    refinement.
void criterion_6() {
    const double sigma = 0.3;
    const TimeGrid grid(1.0, 256);
    const Path x0 = Path::constant(grid, {1.0});
    Matrix b_mat(1, 1);
    b_mat(0, 0) = sigma;
    const CoefficientSet coeffs =
        linear_drift(grid, 0.0, RadonMeasure::dirac(grid, 0.0)).to_coefficients(b_mat);
    const Functional phi = make_analytic_phi("zero_drift_average", Json::object(), 1);

    double worst_integrand = 0.0;
    for (std::size_t k = 0; k < grid.n_nodes(); ++k) {
        const double t = grid.node(k);
        const double integrand = vertical_derivative(phi, t, x0, {sigma});
        worst_integrand = std::max(worst_integrand,
                                   std::abs(integrand - sigma * (grid.horizon() - t)));
    }
    report(6, "Clark-Ocone integrand equals sigma (T - s) nodewise",
           worst_integrand <= 1e-6, "max gap=" + fmt(worst_integrand) + " <= 1e-6");

    ClarkOconeOptions opts;
    opts.n_paths = 10000;
    opts.seed = 53;
    opts.terminal_only = true;
    const ClarkOconeResult res = clark_ocone_residual(phi, coeffs, 0.0, x0, opts);
    report(6, "Clark-Ocone terminal mean within 3 stderr (1e4 paths)", res.report.pass,
           "|mean|=" + fmt(res.report.statistic) + " <= " + fmt(res.report.budget) +
               ", rms=" + fmt(res.rms_terminal));

    // Coupled refinement: base Brownian path at dt = 1/256, coarsened to
    // 1/128; R(T) = -sigma dt sum dW, so the RMS should halve.
    const auto rms_at = [&](std::size_t coarsen) {
        const TimeGrid g(1.0, 256 / coarsen);
        const CoefficientSet c =
            linear_drift(g, 0.0, RadonMeasure::dirac(g, 0.0)).to_coefficients(b_mat);
        const Path x = Path::constant(g, {1.0});
        double acc = 0.0;
        const std::size_t n_paths = 2000;
        for (std::size_t i = 0; i < n_paths; ++i) {
            NoiseBundle noise = sample_noise(TimeGrid(1.0, 256), 1, 59, i);
            if (coarsen > 1) noise = noise.coarsened(coarsen);
            ItoProcessSpec spec;
            spec.initial = x;
            const Path traj = euler_maruyama(spec, c, noise);
            double integral = 0.0;
            for (std::size_t k = 0; k < g.n_steps(); ++k)
                integral += vertical_derivative(phi, g.node(k), traj.stopped_at_node(k),
                                                {sigma * noise.increments[k]});
            const double r = phi.value(1.0, traj) - phi.value(0.0, x) - integral;
            acc += r * r;
        }
        return std::sqrt(acc / n_paths);
    };
    const double rms_fine = rms_at(1);
    const double rms_coarse = rms_at(2);
    const double ratio = rms_coarse / rms_fine;
    report(6, "Clark-Ocone RMS halves under coupled dt refinement",
           ratio >= 1.4 && ratio <= 2.6, "rms(2dt)/rms(dt)=" + fmt(ratio) + " in [1.4, 2.6]");
}

// ---------------------------------------------------------------------------
// 7. Sensitivities: Neumann first derivative vs coupled central differences
//    (rel <= 1e-4) on b(t,y) = tanh(y); second derivative vs the 4-point
//    stencil (rel <= 1e-3); Neumann vs dense linear solve (<= 1e-10).
void criterion_7() {
    const TimeGrid grid(1.0, 128);
    const Path x0 = Path::constant(grid, {0.2});
    Matrix b_mat(1, 1);
    b_mat(0, 0) = 0.3;

    double worst_first = 0.0, worst_second = 0.0, worst_dense = 0.0;
    for (const RadonMeasure& mu :
         {RadonMeasure::dirac(grid, 0.0), RadonMeasure::dirac(grid, 0.25)}) {
        const ConvolutionDrift drift = make_drift("smooth_nonlinear", Json::object(), mu, 1);
        const NoiseBundle noise = sample_noise(grid, 1, 61, 0);
        const SensitivityComparison comp =
            compare_sensitivities(0.0, x0, drift, b_mat, noise);
        worst_first = std::max(worst_first, comp.first_order_rel);
        worst_second = std::max(worst_second, comp.second_order_rel);
        worst_dense = std::max(worst_dense, comp.dense_rel);
    }
    report(7, "first derivative vs coupled finite differences", worst_first <= 1e-4,
           "rel=" + fmt(worst_first) + " <= 1e-4");
    report(7, "second derivative vs 4-point stencil", worst_second <= 1e-3,
           "rel=" + fmt(worst_second) + " <= 1e-3");
    report(7, "Neumann series vs dense linear solve", worst_dense <= 1e-10,
           "rel=" + fmt(worst_dense) + " <= 1e-10");
}

// ---------------------------------------------------------------------------
// 8. Structural exactness: flow residual identically zero; scheme
//    non-anticipativity exact; trace basis invariance <= 1e-8; stop /
//    interpolation / seminorm algebra <= 1e-12.
void criterion_8() {
    const TimeGrid grid(1.0, 64);
    const Path x0 = Path::constant(grid, {1.0});
    Matrix b_mat(1, 1);
    b_mat(0, 0) = 0.3;

    // Flow property, three coefficient families.
    bool flow_ok = true;
    {
        const NoiseBundle noise = sample_noise(grid, 1, 71, 0);
        const CoefficientSet ou =
            linear_drift(grid, 1.0, RadonMeasure::dirac(grid, 0.0)).to_coefficients(b_mat);
        const CoefficientSet delayed =
            linear_drift(grid, 0.8, RadonMeasure::dirac(grid, 0.25)).to_coefficients(b_mat);
        CoefficientSet state_dep;
        state_dep.drift = [](double t, const Path& x) { return Vec{-x.eval(t)[0]}; };
        state_dep.diffusion = [](double t, const Path& x) {
            Matrix m(1, 1);
            m(0, 0) = 0.2 + 0.1 * std::tanh(x.eval(t)[0]);
            return m;
        };
        for (const CoefficientSet& c : {ou, delayed, state_dep})
            for (double s : {0.0, 0.25, 0.5})
                flow_ok = flow_ok && flow_residual(0.0, x0, s, c, noise) == 0.0;
    }
    report(8, "flow residual is exactly zero", flow_ok, "all restarts bitwise equal");

    // Exact non-anticipativity of the scheme.
    bool nonant_ok = true;
    {
        const CoefficientSet ou =
            linear_drift(grid, 1.0, RadonMeasure::dirac(grid, 0.0)).to_coefficients(b_mat);
        const NoiseBundle noise = sample_noise(grid, 1, 73, 0);
        ItoProcessSpec spec;
        spec.initial = x0;
        const Path base = euler_maruyama(spec, ou, noise);
        NoiseBundle perturbed = noise;
        const std::size_t cut = 40;
        for (std::size_t k = cut; k < grid.n_steps(); ++k) perturbed.increments[k] -= 2.0;
        const Path mod = euler_maruyama(spec, ou, perturbed);
        for (std::size_t k = 0; k <= cut; ++k)
            nonant_ok = nonant_ok && base.node(k)[0] == mod.node(k)[0];
    }
    report(8, "scheme non-anticipativity is exact", nonant_ok,
           "prefix states bitwise equal after future perturbation");

    // Trace basis invariance through the raw stencil.
    double trace_gap = 0.0;
    {
        Functional u;
        u.value = [](double t, const Path& x) {
            const Vec y = x.eval(t);
            return y[0] * y[0] + 0.5 * y[1] * y[1] + 0.25 * y[0] * y[1];
        };
        const TimeGrid g2(1.0, 16);
        std::vector<double> vals(g2.n_nodes() * 2);
        const CounterRng rng(75, 0);
        for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = rng.normal(i);
        const Path x2(g2, 2, std::move(vals));
        Matrix phi(2, 2);
        phi(0, 0) = 0.7;
        phi(0, 1) = -0.2;
        phi(1, 0) = 0.1;
        phi(1, 1) = 1.1;
        Matrix raw(2, 2);
        raw(0, 0) = 1.0;
        raw(0, 1) = 0.3;
        raw(1, 0) = -0.7;
        raw(1, 1) = 0.9;
        const BasisSpec rotated(2, 2, Matrix::identity(2), orthonormalize_columns(raw));
        const double a = trace_term(u, 0.5, x2, phi, BasisSpec(2, 2));
        const double b = trace_term(u, 0.5, x2, phi, rotated);
        trace_gap = std::abs(a - b) / std::max(1.0, std::abs(a));
    }
    report(8, "trace term is basis-invariant", trace_gap <= 1e-8,
           "relative gap=" + fmt(trace_gap) + " <= 1e-8");

    // Path algebra at 1e-12.
    bool algebra_ok = true;
    std::string algebra_note = "stop/interp/seminorm identities";
    {
        const CounterRng rng(77, 0);
        std::vector<double> vals(grid.n_nodes());
        for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = rng.normal(i);
        const Path x(grid, 1, std::move(vals));
        algebra_ok = algebra_ok &&
                     sup_norm_diff(stop_path(stop_path(x, 0.5), 0.5), stop_path(x, 0.5)) == 0.0;
        algebra_ok = algebra_ok &&
                     sup_norm_diff(stop_path(stop_path(x, 0.75), 0.25),
                                   stop_path(x, 0.25)) == 0.0;
        std::vector<Vec> pts;
        double maxpt = 0.0;
        for (std::size_t k = 0; k < grid.n_nodes(); ++k) {
            pts.emplace_back(x.node(k).begin(), x.node(k).end());
            maxpt = std::max(maxpt, norm2(x.node(k)));
        }
        algebra_ok = algebra_ok && linear_interp(grid, pts).sup_norm() <= maxpt + 1e-12;
        RadonMeasure nu(grid, {{0.25, 0.7}, {0.75, -1.3}},
                        std::vector<double>(grid.n_steps(), 0.4));
        const CounterRng rng2(78, 0);
        std::vector<double> vals2(grid.n_nodes());
        for (std::size_t i = 0; i < vals2.size(); ++i) vals2[i] = rng2.normal(i);
        const Path y(grid, 1, std::move(vals2));
        algebra_ok = algebra_ok && seminorm(x.add_scaled(y, 1.0), nu) <=
                                       seminorm(x, nu) + seminorm(y, nu) + 1e-12;
        const Path zero = Path::zero(grid, 1);
        algebra_ok = algebra_ok &&
                     std::abs(seminorm(zero.add_scaled(x, -2.0), nu) - 2.0 * seminorm(x, nu)) <=
                         1e-12 * std::max(1.0, seminorm(x, nu));
        for (double lambda : {0.5, 10.0, 50.0}) {
            const double wn = weighted_norm(x, lambda);
            algebra_ok = algebra_ok && wn <= x.sup_norm() * (1.0 + 1e-12);
            algebra_ok = algebra_ok &&
                         wn >= std::exp(-lambda * grid.horizon()) * x.sup_norm() * (1.0 - 1e-12);
        }
    }
    report(8, "path algebra identities at 1e-12", algebra_ok, algebra_note);
}

// ---------------------------------------------------------------------------
// 9. Reproducibility: running a bundled config twice with the same seed
//    produces byte-identical outputs.
void criterion_9(const std::string& config_dir) {
    const std::string config_path = config_dir + "/ou_markov.json";
    std::filesystem::remove_all("acc_rep_a");
    std::filesystem::remove_all("acc_rep_b");
    const ExperimentConfig cfg = load_config(config_path);
    const RunResult a = run_experiment(cfg, "acc_rep_a");
    const RunResult b = run_experiment(cfg, "acc_rep_b");

    bool identical = a.files_written.size() == b.files_written.size();
    std::size_t compared = 0;
    if (identical) {
        for (const auto& entry : std::filesystem::directory_iterator("acc_rep_a")) {
            const std::string name = entry.path().filename().string();
            std::ifstream fa(entry.path(), std::ios::binary);
            std::ifstream fb("acc_rep_b/" + name, std::ios::binary);
            std::ostringstream sa, sb;
            sa << fa.rdbuf();
            sb << fb.rdbuf();
            identical = identical && fb.good() && sa.str() == sb.str();
            ++compared;
        }
    }
    report(9, "bundled config reruns are byte-identical",
           identical && compared > 0 && a.all_pass && b.all_pass,
           fmt(static_cast<double>(compared)) + " files compared, all checks pass");
}

}  // namespace

int main(int argc, char** argv) {
    const std::string config_dir = argc > 1 ? argv[1] : "configs";
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9(config_dir);
    if (g_failures == 0)
        std::cout << "acceptance: all criteria passed\n";
    else
        std::cout << "acceptance: " << g_failures << " criteria FAILED\n";
    return g_failures;
}
