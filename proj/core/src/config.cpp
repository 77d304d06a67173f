#include "funcito/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "funcito/checks.hpp"
#include "funcito/csv.hpp"
#include "funcito/rng.hpp"

namespace funcito {

namespace {

using OrderedJson = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
    throw ConfigError(origin + ": " + what);
}

std::size_t line_of_offset(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

const Json& require_field(const Json& j, const std::string& key, const std::string& origin,
                          const std::string& where) {
    if (!j.contains(key)) fail(origin, where + ": missing mandatory field '" + key + "'");
    return j.at(key);
}

RadonMeasure parse_measure(const Json& entries, const TimeGrid& grid, const std::string& origin) {
    std::vector<RadonMeasure::Atom> atoms;
    std::vector<double> density;
    if (!entries.is_array()) fail(origin, "model.measure must be an array of entries");
    for (const auto& e : entries) {
        const std::string type = require_field(e, "type", origin, "measure entry");
        if (type == "dirac") {
            const double at = require_field(e, "at", origin, "dirac entry");
            const double weight = e.value("weight", 1.0);
            if (!grid.is_aligned(at))
                fail(origin, "measure atom at t=" + std::to_string(at) +
                                 " is not grid-aligned (dt=" + std::to_string(grid.dt()) + ")");
            atoms.push_back({at, weight});
        } else if (type == "density") {
            const auto& vals = require_field(e, "values", origin, "density entry");
            if (!vals.is_array() || vals.size() != grid.n_steps())
                fail(origin, "density needs one value per grid cell (" +
                                 std::to_string(grid.n_steps()) + ")");
            if (density.empty()) density.assign(grid.n_steps(), 0.0);
            for (std::size_t k = 0; k < grid.n_steps(); ++k)
                density[k] += vals[k].get<double>();
        } else {
            fail(origin, "unknown measure entry type '" + type + "'");
        }
    }
    try {
        return RadonMeasure(grid, std::move(atoms), std::move(density));
    } catch (const std::invalid_argument& e) {
        fail(origin, e.what());
    }
}

const std::vector<std::string> kKnownChecks = {
    "clark_ocone", "contraction", "convolution_phi", "feynman_kac", "flow",
    "ito_formula", "kolmogorov",  "sensitivities",   "tower"};

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        fail(origin + ":" + std::to_string(line_of_offset(text, e.byte)), e.what());
    }

    ExperimentConfig cfg;
    if (!j.contains("seed")) fail(origin, "missing mandatory field 'seed'");
    cfg.seed = j.at("seed").get<std::uint64_t>();

    const Json& model = require_field(j, "model", origin, "config");
    const Json& grid_j = require_field(model, "grid", origin, "model");
    const double horizon = require_field(grid_j, "horizon", origin, "model.grid");
    const std::size_t n_steps = require_field(grid_j, "n_steps", origin, "model.grid");
    try {
        cfg.grid = TimeGrid(horizon, n_steps);
    } catch (const std::invalid_argument& e) {
        fail(origin, std::string("model.grid: ") + e.what());
    }
    cfg.dim_h = model.value("dim_h", 1);
    cfg.dim_u = model.value("dim_u", 1);
    if (cfg.dim_h == 0 || cfg.dim_u == 0) fail(origin, "model dims must be >= 1");

    const Json& drift_j = require_field(model, "drift", origin, "model");
    const std::string drift_name = require_field(drift_j, "name", origin, "model.drift");
    if (!drift_exists(drift_name)) fail(origin, "unknown drift '" + drift_name + "'");
    const Json drift_params = drift_j.value("params", Json::object());

    const RadonMeasure measure =
        parse_measure(require_field(model, "measure", origin, "model"), cfg.grid, origin);
    try {
        cfg.drift = make_drift(drift_name, drift_params, measure, cfg.dim_h);
    } catch (const std::invalid_argument& e) {
        fail(origin, e.what());
    }

    const Json& diff_j = require_field(model, "diffusion", origin, "model");
    if (!diff_j.is_array() || diff_j.size() != cfg.dim_h)
        fail(origin, "model.diffusion must be an N x M matrix (array of rows)");
    cfg.diffusion_b = Matrix(cfg.dim_h, cfg.dim_u);
    for (std::size_t i = 0; i < cfg.dim_h; ++i) {
        if (!diff_j[i].is_array() || diff_j[i].size() != cfg.dim_u)
            fail(origin, "model.diffusion row " + std::to_string(i) + " must have M entries");
        for (std::size_t m = 0; m < cfg.dim_u; ++m)
            cfg.diffusion_b(i, m) = diff_j[i][m].get<double>();
    }

    const Json& init_j = require_field(model, "initial", origin, "model");
    if (init_j.contains("constant")) {
        const auto& arr = init_j.at("constant");
        if (!arr.is_array() || arr.size() != cfg.dim_h)
            fail(origin, "model.initial.constant must have N entries");
        Vec v(cfg.dim_h);
        for (std::size_t i = 0; i < cfg.dim_h; ++i) v[i] = arr[i].get<double>();
        cfg.initial = Path::constant(cfg.grid, v);
    } else if (init_j.contains("values")) {
        const auto& rows = init_j.at("values");
        if (!rows.is_array() || rows.size() != cfg.grid.n_nodes())
            fail(origin, "model.initial.values must have one row per node");
        std::vector<double> vals(cfg.grid.n_nodes() * cfg.dim_h);
        for (std::size_t k = 0; k < rows.size(); ++k)
            for (std::size_t i = 0; i < cfg.dim_h; ++i)
                vals[k * cfg.dim_h + i] = rows[k][i].get<double>();
        cfg.initial = Path(cfg.grid, cfg.dim_h, std::move(vals));
    } else {
        fail(origin, "model.initial needs 'constant' or 'values'");
    }

    const Json& func_j = require_field(j, "functional", origin, "config");
    cfg.functional_name = require_field(func_j, "name", origin, "functional").get<std::string>();
    if (!functional_exists(cfg.functional_name))
        fail(origin, "unknown functional '" + cfg.functional_name + "'");
    cfg.functional_params = func_j.value("params", Json::object());
    try {
        (void)make_functional(cfg.functional_name, cfg.functional_params, cfg.dim_h);
    } catch (const std::invalid_argument& e) {
        fail(origin, e.what());
    }

    const Json& checks_j = require_field(j, "checks", origin, "config");
    if (!checks_j.is_array() || checks_j.empty()) fail(origin, "checks must be a non-empty array");
    for (const auto& c : checks_j) {
        const std::string name = require_field(c, "name", origin, "check entry");
        if (std::find(kKnownChecks.begin(), kKnownChecks.end(), name) == kKnownChecks.end())
            fail(origin, "unknown check '" + name + "'");
        Json params = c.value("params", Json::object());
        if (name == "kolmogorov" || name == "clark_ocone") {
            const std::string phi = params.value("phi", "estimated");
            if (phi != "estimated" && !analytic_phi_exists(phi))
                fail(origin, "check '" + name + "': unknown analytic phi '" + phi + "'");
        }
        cfg.checks.emplace_back(name, std::move(params));
    }

    if (j.contains("output")) cfg.output_directory = j.at("output").value("directory", "out");
    return cfg;
}

ExperimentConfig load_config(const std::string& file_path) {
    std::ifstream in(file_path, std::ios::binary);
    if (!in) throw ConfigError(file_path + ": cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), file_path);
}

namespace {

std::uint64_t check_seed(std::uint64_t seed, std::uint64_t salt) {
    return splitmix64(seed ^ splitmix64(salt + 0xC0FFEEULL));
}

struct CheckContext {
    const ExperimentConfig& cfg;
    CoefficientSet coeffs;
    Functional f;
    std::string outdir;
    std::vector<std::string>* files;
};

void write_file(const CheckContext& cc, const std::string& name, const std::string& content) {
    const std::string full = cc.outdir + "/" + name;
    write_text_file(full, content);
    cc.files->push_back(full);
}

std::vector<ResidualReport> run_feynman_kac(const CheckContext& cc, const Json& params) {
    const double t = params.value("t", 0.0);
    const std::size_t n_paths = params.value("n_paths", 10000);
    const MCEstimate est =
        feynman_kac(t, cc.cfg.initial, cc.f, cc.coeffs, n_paths, cc.cfg.seed);

    ResidualReport rep;
    rep.check = "feynman_kac";
    if (params.contains("expect_value")) {
        const double expect = params.at("expect_value").get<double>();
        rep.statistic = std::abs(est.value - expect);
        rep.budget = params.value("tol_stderr_mult", 3.0) * est.std_error +
                     params.value("tol_abs", 0.0);
        rep.pass = rep.statistic <= rep.budget;
        rep.detail("expect", expect);
    } else {
        rep.statistic = 0.0;
        rep.budget = 0.0;
        rep.pass = std::isfinite(est.value);
    }
    rep.detail("value", est.value);
    rep.detail("stderr", est.std_error);

    // Plot-ready node statistics from a capped companion ensemble.
    const std::size_t cap = std::min<std::size_t>(n_paths, 256);
    std::vector<Path> ensemble;
    ensemble.reserve(cap);
    for (std::size_t i = 0; i < cap; ++i) {
        ItoProcessSpec spec;
        spec.start_time = t;
        spec.initial = cc.cfg.initial;
        ensemble.push_back(euler_maruyama(
            spec, cc.coeffs, sample_noise(cc.cfg.grid, cc.cfg.dim_u, cc.cfg.seed, i)));
    }
    std::ostringstream os;
    write_ensemble_summary_csv(os, ensemble);
    write_file(cc, "feynman_kac_ensemble.csv", os.str());
    return {rep};
}

std::vector<ResidualReport> run_tower(const CheckContext& cc, const Json& params) {
    const double t_prime = params.value("t_prime", 0.0);
    const double t = params.value("t", cc.cfg.grid.horizon() / 2.0);
    const std::size_t n_outer = params.value("n_outer", 200);
    const std::size_t n_inner = params.value("n_inner", 500);
    return {tower_residual(t_prime, t, cc.cfg.initial, cc.f, cc.coeffs, n_outer, n_inner,
                           check_seed(cc.cfg.seed, 0x70))};
}

std::vector<ResidualReport> run_ito(const CheckContext& cc, const Json& params) {
    const std::size_t n_traj = params.value("n_trajectories", 4);
    const double tol = params.value("tol", 1e-8);
    const double t_hat = params.value("t_hat", 0.0);

    ResidualReport rep;
    rep.check = "ito_formula";
    rep.budget = tol;

    const double violation =
        check_nonanticipativity(cc.f, cc.cfg.grid, cc.cfg.dim_h, 32,
                                check_seed(cc.cfg.seed, 0x16));
    if (violation > 1e-10) {
        rep.statistic = violation;
        rep.pass = false;
        rep.note = "functional is anticipative; the Ito formula does not apply";
        return {rep};
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < n_traj; ++i) {
        const NoiseBundle noise =
            sample_noise(cc.cfg.grid, cc.cfg.dim_u, check_seed(cc.cfg.seed, 0x17), i);
        const ResidualReport one = ito_residual(cc.f, t_hat, cc.cfg.initial, cc.coeffs, noise);
        worst = std::max(worst, one.max_abs);
        if (i == 0) {
            std::ostringstream os;
            os << "t,residual\n";
            for (std::size_t k = 0; k < one.per_node.size(); ++k)
                os << format_float(cc.cfg.grid.node(k)) << ","
                   << format_float(one.per_node[k]) << "\n";
            write_file(cc, "ito_formula_residual.csv", os.str());
        }
    }
    rep.statistic = worst;
    rep.pass = worst <= tol;
    rep.max_abs = rep.rms = worst;
    rep.detail("trajectories", static_cast<double>(n_traj));

    // Callbacks are authoritative when present; emit the finite-difference
    // cross-check alongside the residual.
    if (cc.f.vertical || cc.f.second_vertical || cc.f.left_time) {
        std::ostringstream os;
        os << "t,vertical_callback,vertical_fd,vertical_gap,second_callback,second_fd,"
              "second_gap,left_time_callback,left_time_fd,left_time_gap\n";
        const Vec e1 = [&] {
            Vec v(cc.cfg.dim_h, 0.0);
            v[0] = 1.0;
            return v;
        }();
        for (double t : {0.25, 0.5, 0.75}) {
            const CallbackCrosscheck probe =
                crosscheck_callbacks(cc.f, t, cc.cfg.initial, e1);
            os << format_float(probe.t) << "," << format_float(probe.vertical_callback) << ","
               << format_float(probe.vertical_fd) << "," << format_float(probe.vertical_gap)
               << "," << format_float(probe.second_callback) << ","
               << format_float(probe.second_fd) << "," << format_float(probe.second_gap) << ","
               << format_float(probe.left_time_callback) << ","
               << format_float(probe.left_time_fd) << ","
               << format_float(probe.left_time_gap) << "\n";
        }
        write_file(cc, "ito_callback_crosscheck.csv", os.str());
    }
    return {rep};
}

std::vector<ResidualReport> run_kolmogorov(const CheckContext& cc, const Json& params) {
    const double t = params.value("t", cc.cfg.grid.horizon() / 2.0);
    const std::string phi_name = params.value("phi", "estimated");
    if (phi_name != "estimated") {
        const Functional phi =
            make_analytic_phi(phi_name, params.value("phi_params", Json::object()), cc.cfg.dim_h);
        const double tol = params.value("tol", 1e-6);
        return {kolmogorov_residual_analytic(phi, cc.coeffs, t, cc.cfg.initial, tol)};
    }
    KolmogorovOptions opts;
    opts.n_paths = params.value("n_paths", 8000);
    opts.seed = check_seed(cc.cfg.seed, 0x2B);
    return {kolmogorov_residual(cc.f, cc.coeffs, t, cc.cfg.initial, opts)};
}

std::vector<ResidualReport> run_clark_ocone(const CheckContext& cc, const Json& params) {
    const double t_hat = params.value("t_hat", 0.0);
    const std::string phi_name = params.value("phi", "estimated");
    ClarkOconeOptions opts;
    opts.seed = check_seed(cc.cfg.seed, 0x31);

    Functional phi;
    if (phi_name != "estimated") {
        phi = make_analytic_phi(phi_name, params.value("phi_params", Json::object()), cc.cfg.dim_h);
        opts.n_paths = params.value("n_paths", 10000);
    } else {
        phi = make_mc_value_functional(make_euler_solver(cc.coeffs), cc.cfg.dim_u, cc.f,
                                       params.value("n_paths_phi", 256),
                                       check_seed(cc.cfg.seed, 0x32));
        opts.n_paths = params.value("n_paths", 64);
        opts.terminal_only = true;
    }
    const ClarkOconeResult res = clark_ocone_residual(phi, cc.coeffs, t_hat, cc.cfg.initial, opts);
    if (!opts.terminal_only) {
        std::ostringstream os;
        os << "t,mean_residual\n";
        for (std::size_t k = 0; k < res.mean_per_node.size(); ++k)
            os << format_float(cc.cfg.grid.node(k)) << ","
               << format_float(res.mean_per_node[k]) << "\n";
        write_file(cc, "clark_ocone_mean_residual.csv", os.str());
    }
    return {res.report};
}

std::vector<ResidualReport> run_contraction(const CheckContext& cc, const Json& params) {
    std::vector<double> lambdas = {2.0, 5.0, 10.0};
    if (params.contains("lambdas")) {
        lambdas.clear();
        for (const auto& l : params.at("lambdas")) lambdas.push_back(l.get<double>());
    }
    const std::size_t n_pairs = params.value("n_pairs", 100);
    const double picard_factor = params.value("picard_factor", 1.05);
    const double t = params.value("t", 0.0);

    const NoiseBundle noise =
        sample_noise(cc.cfg.grid, cc.cfg.dim_u, check_seed(cc.cfg.seed, 0xC0), 0);
    const Path wb = integrate_constant_noise(cc.cfg.diffusion_b, noise);

    ResidualReport rep;
    rep.check = "contraction";
    rep.budget = 1.0;
    double worst = 0.0;
    bool pass = true;
    std::ostringstream os;
    os << "lambda,bound,max_ratio,max_picard_ratio,picard_iterations\n";
    for (double lambda : lambdas) {
        const ContractionProbe probe =
            probe_contraction(cc.cfg.drift, cc.cfg.initial, wb, t, lambda, n_pairs,
                              check_seed(cc.cfg.seed, 0xC1));
        worst = std::max(worst, probe.max_ratio / probe.bound);
        pass = pass && probe.max_ratio <= probe.bound &&
               probe.max_picard_ratio <= probe.bound * picard_factor;
        os << format_float(lambda) << "," << format_float(probe.bound) << ","
           << format_float(probe.max_ratio) << "," << format_float(probe.max_picard_ratio)
           << "," << probe.picard_iterations << "\n";
        rep.detail("ratio_over_bound@" + format_float(lambda), probe.max_ratio / probe.bound);
    }
    rep.statistic = worst;
    rep.pass = pass;
    write_file(cc, "contraction_ratios.csv", os.str());
    return {rep};
}

std::vector<ResidualReport> run_sensitivities(const CheckContext& cc, const Json& params) {
    const double t = params.value("t", 0.0);
    const NoiseBundle noise =
        sample_noise(cc.cfg.grid, cc.cfg.dim_u, check_seed(cc.cfg.seed, 0x53), 0);
    const SensitivityComparison comp =
        compare_sensitivities(t, cc.cfg.initial, cc.cfg.drift, cc.cfg.diffusion_b, noise);

    std::ostringstream os;
    os << "direction_id,t,node,neumann_value,fd_value,rel_err\n";
    for (const auto& row : comp.rows)
        os << row.direction_id << "," << format_float(row.t) << "," << row.node << ","
           << format_float(row.neumann_value) << "," << format_float(row.fd_value) << ","
           << format_float(row.rel_err) << "\n";
    write_file(cc, "sensitivity_report.csv", os.str());

    std::ostringstream diag;
    diag << "iteration,lambda_error,sup_error\n";
    for (std::size_t i = 0; i < comp.diagnostics.lambda_errors.size(); ++i)
        diag << (i + 1) << "," << format_float(comp.diagnostics.lambda_errors[i]) << ","
             << format_float(comp.diagnostics.sup_errors[i]) << "\n";
    write_file(cc, "picard_diagnostics.csv", diag.str());

    std::vector<ResidualReport> reps;
    {
        ResidualReport r;
        r.check = "sensitivities_first_order";
        r.statistic = comp.first_order_rel;
        r.budget = params.value("fd_rel_tol", 1e-4);
        r.pass = r.statistic <= r.budget;
        reps.push_back(r);
    }
    {
        ResidualReport r;
        r.check = "sensitivities_second_order";
        r.statistic = comp.second_order_rel;
        r.budget = params.value("second_rel_tol", 1e-3);
        r.pass = r.statistic <= r.budget;
        reps.push_back(r);
    }
    if (comp.dense_checked) {
        ResidualReport r;
        r.check = "sensitivities_dense_oracle";
        r.statistic = comp.dense_rel;
        r.budget = params.value("dense_tol", 1e-10);
        r.pass = r.statistic <= r.budget;
        reps.push_back(r);
    }
    return reps;
}

std::vector<ResidualReport> run_flow(const CheckContext& cc, const Json& params) {
    const double t = params.value("t", 0.0);
    const double s = params.value("s", cc.cfg.grid.horizon() / 2.0);
    const NoiseBundle noise =
        sample_noise(cc.cfg.grid, cc.cfg.dim_u, check_seed(cc.cfg.seed, 0x46), 0);
    ResidualReport rep;
    rep.check = "flow";
    rep.statistic = flow_residual(t, cc.cfg.initial, s, cc.coeffs, noise);
    rep.budget = 0.0;
    rep.pass = rep.statistic == 0.0;
    return {rep};
}

std::vector<ResidualReport> run_convolution_phi(const CheckContext& cc, const Json& params) {
    ConvolutionPhiOptions opts;
    opts.t_hat = params.value("t_hat", 0.0);
    opts.n_paths = params.value("n_paths", 32);
    opts.n_paths_phi = params.value("n_paths_phi", 256);
    opts.kolmogorov_paths = params.value("kolmogorov_paths", 2000);
    opts.grad_rel_tol = params.value("grad_rel_tol", 1e-3);
    opts.seed = check_seed(cc.cfg.seed, 0x55);
    const ConvolutionPhiReport rep =
        verify_convolution_phi(cc.f, cc.cfg.drift, cc.cfg.diffusion_b, cc.cfg.initial, opts);
    return {rep.gradient_crosscheck, rep.kolmogorov, rep.clark_ocone};
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, const std::string& output_dir_override) {
    const std::string outdir =
        output_dir_override.empty() ? cfg.output_directory : output_dir_override;
    std::filesystem::create_directories(outdir);

    RunResult result;
    CheckContext cc{cfg, cfg.drift.to_coefficients(cfg.diffusion_b),
                    make_functional(cfg.functional_name, cfg.functional_params, cfg.dim_h),
                    outdir, &result.files_written};

    OrderedJson verdicts = OrderedJson::array();
    for (const auto& [name, params] : cfg.checks) {
        std::vector<ResidualReport> reps;
        try {
            if (name == "feynman_kac")
                reps = run_feynman_kac(cc, params);
            else if (name == "tower")
                reps = run_tower(cc, params);
            else if (name == "ito_formula")
                reps = run_ito(cc, params);
            else if (name == "kolmogorov")
                reps = run_kolmogorov(cc, params);
            else if (name == "clark_ocone")
                reps = run_clark_ocone(cc, params);
            else if (name == "contraction")
                reps = run_contraction(cc, params);
            else if (name == "sensitivities")
                reps = run_sensitivities(cc, params);
            else if (name == "flow")
                reps = run_flow(cc, params);
            else if (name == "convolution_phi")
                reps = run_convolution_phi(cc, params);
        } catch (const SolveError& e) {
            ResidualReport rep;
            rep.check = name;
            rep.statistic = std::numeric_limits<double>::infinity();
            rep.pass = false;
            rep.note = e.what();
            reps = {rep};
        }
        for (auto& rep : reps) {
            OrderedJson v;
            v["check"] = rep.check;
            v["params"] = params;
            v["value"] = rep.statistic;
            v["budget"] = rep.budget;
            v["pass"] = rep.pass;
            if (!rep.note.empty()) v["note"] = rep.note;
            for (const auto& [k, val] : rep.details) v["details"][k] = val;
            verdicts.push_back(v);
            result.reports.push_back(std::move(rep));
        }
    }

    std::ostringstream summary;
    summary << "check,statistic,budget,pass\n";
    result.all_pass = true;
    for (const auto& rep : result.reports) {
        summary << rep.check << "," << format_float(rep.statistic) << ","
                << format_float(rep.budget) << "," << (rep.pass ? "true" : "false") << "\n";
        result.all_pass = result.all_pass && rep.pass;
    }
    write_text_file(outdir + "/summary.csv", summary.str());
    result.files_written.push_back(outdir + "/summary.csv");
    write_text_file(outdir + "/verdicts.json", verdicts.dump(2) + "\n");
    result.files_written.push_back(outdir + "/verdicts.json");
    return result;
}

}  // namespace funcito
