#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "funcito/noise.hpp"
#include "funcito/sde.hpp"

using namespace funcito;

namespace {

CoefficientSet ou_coefficients(double kappa, double sigma) {
    CoefficientSet c;
    c.dim_h = 1;
    c.dim_u = 1;
    c.drift = [kappa](double t, const Path& x) { return Vec{-kappa * x.eval(t)[0]}; };
    c.diffusion = [sigma](double, const Path&) {
        Matrix m(1, 1);
        m(0, 0) = sigma;
        return m;
    };
    return c;
}

}  // namespace

TEST_CASE("noise sampling is a pure function of (seed, stream)") {
    const TimeGrid grid(1.0, 64);
    const NoiseBundle a = sample_noise(grid, 2, 99, 5);
    const NoiseBundle b = sample_noise(grid, 2, 99, 5);
    CHECK(a.increments == b.increments);
    const NoiseBundle c = sample_noise(grid, 2, 99, 6);
    CHECK(a.increments != c.increments);
}

TEST_CASE("noise moments and cross-stream independence") {
    const TimeGrid grid(1.0, 100000);
    const NoiseBundle a = sample_noise(grid, 1, 7, 0);
    const NoiseBundle b = sample_noise(grid, 1, 7, 1);
    const double dt = grid.dt();

    double mean = 0.0, var = 0.0, cross = 0.0;
    for (std::size_t k = 0; k < grid.n_steps(); ++k) mean += a.increments[k];
    mean /= static_cast<double>(grid.n_steps());
    for (std::size_t k = 0; k < grid.n_steps(); ++k) {
        var += (a.increments[k] - mean) * (a.increments[k] - mean);
        cross += a.increments[k] * b.increments[k];
    }
    var /= static_cast<double>(grid.n_steps() - 1);
    // 5-sigma band for the mean of n normals with variance dt.
    CHECK(std::abs(mean) <= 5.0 * std::sqrt(dt / static_cast<double>(grid.n_steps())));
    CHECK(var == doctest::Approx(dt).epsilon(0.05));
    const double corr = cross / (static_cast<double>(grid.n_steps()) * dt);
    CHECK(std::abs(corr) <= 0.05);
}

TEST_CASE("integrate_constant_noise") {
    const TimeGrid grid(1.0, 32);
    const NoiseBundle noise = sample_noise(grid, 1, 13, 0);

    SUBCASE("zero operator gives the zero path") {
        CHECK(integrate_constant_noise(Matrix(1, 1), noise).sup_norm() == 0.0);
    }
    SUBCASE("identity gives the random-walk partial sums") {
        const Path wb = integrate_constant_noise(Matrix::identity(1), noise);
        double acc = 0.0;
        CHECK(wb.node(0)[0] == 0.0);
        for (std::size_t k = 0; k < grid.n_steps(); ++k) {
            acc += noise.increments[k];
            CHECK(wb.node(k + 1)[0] == acc);
        }
    }
    SUBCASE("terminal variance matches the Ito isometry") {
        Matrix b(1, 2);
        b(0, 0) = 1.0;
        b(0, 1) = 0.5;
        const std::size_t n_paths = 10000;
        double sum = 0.0, sumsq = 0.0;
        for (std::size_t i = 0; i < n_paths; ++i) {
            const NoiseBundle ni = sample_noise(grid, 2, 21, i);
            const double xt = integrate_constant_noise(b, ni).node(grid.n_steps())[0];
            sum += xt;
            sumsq += xt * xt;
        }
        const double var = (sumsq - sum * sum / n_paths) / (n_paths - 1.0);
        const double expect = grid.horizon() * b.frobenius_norm() * b.frobenius_norm();
        CHECK(var == doctest::Approx(expect).epsilon(0.05));
    }
}

TEST_CASE("euler_maruyama degenerate cases are exact") {
    const TimeGrid grid(1.0, 16);
    const NoiseBundle noise = sample_noise(grid, 1, 3, 0);
    std::vector<double> ramp(grid.n_nodes());
    for (std::size_t k = 0; k < grid.n_nodes(); ++k) ramp[k] = 1.0 + grid.node(k);
    const Path y_hat(grid, 1, std::move(ramp));

    SUBCASE("no drift, no noise: the solution is the stopped initial path") {
        CoefficientSet c;
        c.drift = [](double, const Path&) { return Vec{0.0}; };
        c.diffusion = [](double, const Path&) { return Matrix(1, 1); };
        ItoProcessSpec spec;
        spec.start_time = 0.5;
        spec.initial = y_hat;
        const Path x = euler_maruyama(spec, c, noise);
        CHECK(sup_norm_diff(x, y_hat.stopped(0.5)) == 0.0);
    }
    SUBCASE("pure constant noise: Y_{that ^ .} plus the W^B increment") {
        Matrix b(1, 1);
        b(0, 0) = 0.8;
        const CoefficientSet c = CoefficientSet::zero_drift_constant(b);
        ItoProcessSpec spec;
        spec.start_time = 0.25;
        spec.initial = y_hat;
        const Path x = euler_maruyama(spec, c, noise);
        const Path wb = integrate_constant_noise(b, noise);
        const std::size_t k0 = grid.aligned_index(0.25);
        for (std::size_t k = 0; k < grid.n_nodes(); ++k) {
            const double frozen = y_hat.node(std::min(k, k0))[0];
            const double inc = wb.node(std::max(k, k0))[0] - wb.node(k0)[0];
            CHECK(x.node(k)[0] == doctest::Approx(frozen + inc).epsilon(1e-15));
        }
    }
}

TEST_CASE("euler_maruyama OU mean matches the closed form") {
    const double kappa = 1.0, sigma = 0.3, x0 = 1.0;
    const TimeGrid grid(1.0, 256);
    const CoefficientSet coeffs = ou_coefficients(kappa, sigma);
    const std::size_t n_paths = 20000;
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i = 0; i < n_paths; ++i) {
        ItoProcessSpec spec;
        spec.initial = Path::constant(grid, {x0});
        const Path x = euler_maruyama(spec, coeffs, sample_noise(grid, 1, 2024, i));
        const double xt = x.node(grid.n_steps())[0];
        sum += xt;
        sumsq += xt * xt;
    }
    const double mean = sum / n_paths;
    const double sd = std::sqrt((sumsq - sum * sum / n_paths) / (n_paths - 1.0));
    const double stderr_ = sd / std::sqrt(static_cast<double>(n_paths));
    CHECK(std::abs(mean - x0 * std::exp(-kappa)) <= 3.0 * stderr_ + 5.0 * grid.dt());
}

TEST_CASE("scheme non-anticipativity: future increments do not affect the past") {
    const TimeGrid grid(1.0, 32);
    const CoefficientSet coeffs = ou_coefficients(0.7, 0.5);
    const NoiseBundle noise = sample_noise(grid, 1, 5, 0);
    ItoProcessSpec spec;
    spec.initial = Path::constant(grid, {1.0});
    const Path base = euler_maruyama(spec, coeffs, noise);

    const std::size_t cut = 20;
    NoiseBundle perturbed = noise;
    for (std::size_t k = cut; k < grid.n_steps(); ++k) perturbed.increments[k] += 1.0;
    const Path mod = euler_maruyama(spec, coeffs, perturbed);
    for (std::size_t k = 0; k <= cut; ++k) CHECK(base.node(k)[0] == mod.node(k)[0]);
    CHECK(base.node(cut + 1)[0] != mod.node(cut + 1)[0]);
}

TEST_CASE("monotone coupling for additive noise") {
    const TimeGrid grid(1.0, 64);
    CoefficientSet c;
    c.drift = [](double, const Path&) { return Vec{0.0}; };
    c.diffusion = [](double, const Path&) {
        Matrix m(1, 1);
        m(0, 0) = 0.6;
        return m;
    };
    const NoiseBundle noise = sample_noise(grid, 1, 17, 0);
    ItoProcessSpec lo, hi;
    lo.initial = Path::constant(grid, {0.0});
    hi.initial = Path::constant(grid, {0.5});
    const Path xlo = euler_maruyama(lo, c, noise);
    const Path xhi = euler_maruyama(hi, c, noise);
    for (std::size_t k = 0; k < grid.n_nodes(); ++k) CHECK(xlo.node(k)[0] < xhi.node(k)[0]);
}

TEST_CASE("strong convergence order for additive-noise OU is about one") {
    const CoefficientSet coeffs = ou_coefficients(1.0, 0.3);
    const TimeGrid fine(1.0, 512);
    const std::size_t n_paths = 400;

    const auto rms_gap_at = [&](std::size_t coarse_steps) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n_paths; ++i) {
            const NoiseBundle nf = sample_noise(fine, 1, 31, i);
            const NoiseBundle nc = nf.coarsened(fine.n_steps() / coarse_steps);
            ItoProcessSpec sf, sc;
            sf.initial = Path::constant(fine, {1.0});
            sc.initial = Path::constant(nc.grid, {1.0});
            const double xf = euler_maruyama(sf, coeffs, nf).node(fine.n_steps())[0];
            const double xc = euler_maruyama(sc, coeffs, nc).node(coarse_steps)[0];
            acc += (xf - xc) * (xf - xc);
        }
        return std::sqrt(acc / n_paths);
    };

    const double r64 = rms_gap_at(64);
    const double r128 = rms_gap_at(128);
    const double slope = std::log2(r64 / r128);
    CHECK(slope >= 0.9);
}

TEST_CASE("stopped coordinates") {
    const TimeGrid fine(1.0, 64);
    const TimeGrid coarse(1.0, 8);

    SUBCASE("constant path: every coordinate equals the path") {
        const Path x = Path::constant(fine, {2.0});
        for (const Path& p : stopped_coordinates(x, coarse))
            CHECK(sup_norm_diff(p, x) == 0.0);
    }
    SUBCASE("single-interval partition: entries are the path itself") {
        std::vector<double> vals(fine.n_nodes());
        for (std::size_t k = 0; k < fine.n_nodes(); ++k) vals[k] = std::sin(fine.node(k));
        const Path x(fine, 1, std::move(vals));
        for (const Path& p : stopped_coordinates(x, TimeGrid(1.0, 1)))
            CHECK(sup_norm_diff(p, x) == 0.0);
    }
    SUBCASE("entry i is the path stopped at the (i+1)-th partition node") {
        std::vector<double> vals(fine.n_nodes());
        for (std::size_t k = 0; k < fine.n_nodes(); ++k) vals[k] = std::cos(3.0 * fine.node(k));
        const Path x(fine, 1, std::move(vals));
        const auto coords = stopped_coordinates(x, coarse);
        REQUIRE(coords.size() == coarse.n_nodes());
        for (std::size_t i = 0; i + 1 < coords.size(); ++i)
            CHECK(sup_norm_diff(coords[i], x.stopped(coarse.node(i + 1))) == 0.0);
        CHECK(sup_norm_diff(coords.back(), x) == 0.0);
    }
    SUBCASE("non-nested grids are rejected") {
        const Path x = Path::constant(fine, {1.0});
        CHECK_THROWS_AS(stopped_coordinates(x, TimeGrid(1.0, 7)), std::invalid_argument);
    }
}

TEST_CASE("partition coefficient slots") {
    const TimeGrid coarse(1.0, 4);
    const Vec b = {2.0, -1.0};

    SUBCASE("before the second node every slot carries the value") {
        const auto slots = partition_drift_slots(b, 0.1, coarse);
        REQUIRE(slots.size() == coarse.n_nodes());
        for (const Vec& s : slots) CHECK(s == b);
    }
    SUBCASE("at the horizon only the closed final slot is set") {
        const auto slots = partition_drift_slots(b, 1.0, coarse);
        for (std::size_t i = 0; i + 1 < slots.size(); ++i) CHECK(slots[i] == Vec{0.0, 0.0});
        CHECK(slots.back() == b);
    }
    SUBCASE("interpolated slots converge to the indicator profile") {
        // Away from (s - 2 delta, s), the interpolation of the slots equals
        // 1_{[s,T]}(.) b exactly.
        const TimeGrid part(1.0, 16);
        const double s = 0.35;
        const auto slots = partition_drift_slots({1.0}, s, part);
        std::vector<Vec> pts(slots.begin(), slots.end());
        const Path lifted = linear_interp(part, pts);
        const TimeGrid probe(1.0, 128);
        const double delta = part.dt();
        for (std::size_t k = 0; k < probe.n_nodes(); ++k) {
            const double t = probe.node(k);
            if (t > s - 2.0 * delta && t < s) continue;
            const double expect = (t >= s) ? 1.0 : 0.0;
            CHECK(lifted.eval(t)[0] == expect);
        }
    }
    SUBCASE("diffusion slots follow the same indicators") {
        Matrix phi(1, 2);
        phi(0, 0) = 1.0;
        phi(0, 1) = -2.0;
        const auto slots = partition_diffusion_slots(phi, 0.6, coarse);
        CHECK(slots[0].data == std::vector<double>{0.0, 0.0});  // 1_{[0,0.25)}(0.6) = 0
        CHECK(slots[1].data == std::vector<double>{0.0, 0.0});  // 1_{[0,0.5)}(0.6) = 0
        CHECK(slots[2].data == phi.data);                       // 1_{[0,0.75)}(0.6) = 1
        CHECK(slots[3].data == phi.data);
        CHECK(slots[4].data == phi.data);
    }
}

TEST_CASE("flow residual is exactly zero") {
    const TimeGrid grid(1.0, 64);
    const NoiseBundle noise = sample_noise(grid, 1, 77, 0);
    const Path x0 = Path::constant(grid, {1.0});

    SUBCASE("restart at the same time") {
        const CoefficientSet coeffs = ou_coefficients(1.0, 0.4);
        CHECK(flow_residual(0.0, x0, 0.0, coeffs, noise) == 0.0);
    }
    SUBCASE("deterministic delayed drift") {
        CoefficientSet c;
        c.drift = [](double t, const Path& x) {
            const double lag = 0.25;
            const double arg = t >= lag ? x.eval(t - lag)[0] : x.eval(0.0)[0];
            return Vec{-0.9 * arg};
        };
        c.diffusion = [](double, const Path&) { return Matrix(1, 1); };
        for (double s : {0.25, 0.5, 0.875}) CHECK(flow_residual(0.0, x0, s, c, noise) == 0.0);
    }
    SUBCASE("general case with state-dependent diffusion") {
        CoefficientSet c;
        c.drift = [](double t, const Path& x) { return Vec{-x.eval(t)[0]}; };
        c.diffusion = [](double t, const Path& x) {
            Matrix m(1, 1);
            m(0, 0) = 0.2 + 0.1 * std::tanh(x.eval(t)[0]);
            return m;
        };
        for (double s : {0.25, 0.5}) CHECK(flow_residual(0.0, x0, s, c, noise) == 0.0);
    }
}

TEST_CASE("divergence guard reports the first bad step") {
    const TimeGrid grid(1.0, 16);
    CoefficientSet c;
    c.drift = [](double, const Path& x) { return Vec{1e9 * (1.0 + x.node(0)[0])}; };
    c.diffusion = [](double, const Path&) { return Matrix(1, 1); };
    ItoProcessSpec spec;
    spec.initial = Path::constant(grid, {1.0});
    CHECK_THROWS_AS(euler_maruyama(spec, c, sample_noise(grid, 1, 1, 0)), SolveError);
}

TEST_CASE("coefficient shape mismatches are rejected") {
    const TimeGrid grid(1.0, 8);
    const NoiseBundle noise = sample_noise(grid, 2, 1, 0);
    CoefficientSet c;
    c.dim_h = 1;
    c.dim_u = 2;
    c.drift = [](double, const Path&) { return Vec{0.0, 0.0}; };  // wrong dim
    c.diffusion = [](double, const Path&) { return Matrix(1, 2); };
    ItoProcessSpec spec;
    spec.initial = Path::constant(grid, {1.0});
    CHECK_THROWS_AS(euler_maruyama(spec, c, noise), std::invalid_argument);

    CHECK_THROWS_AS(integrate_constant_noise(Matrix(1, 1), noise), std::invalid_argument);
}

TEST_CASE("start times must be grid-aligned") {
    const TimeGrid grid(1.0, 8);
    CHECK(grid.aligned_index(0.25) == 2);
    CHECK_THROWS_AS(grid.aligned_index(0.3), std::invalid_argument);
    CHECK_THROWS_AS(grid.aligned_index(1.5), std::invalid_argument);
    CHECK(grid.snap_index(0.3) == 2);  // nearest-node snap still works
}

TEST_CASE("raw integrand process matches the hand-rolled sum") {
    const TimeGrid grid(1.0, 8);
    const NoiseBundle noise = sample_noise(grid, 1, 9, 0);
    ItoProcessSpec spec;
    spec.start_time = 0.25;
    spec.initial = Path::constant(grid, {2.0});
    Matrix phi(1, 1);
    phi(0, 0) = 0.5;
    for (std::size_t k = 0; k < grid.n_steps(); ++k) {
        spec.drift_steps.push_back({0.3});
        spec.diffusion_steps.push_back(phi);
    }
    const Path x = integrate_ito_process(spec, noise);
    const std::size_t k0 = grid.aligned_index(0.25);
    double acc = 2.0;
    for (std::size_t k = k0; k < grid.n_steps(); ++k) {
        acc += 0.3 * grid.dt() + 0.5 * noise.increments[k];
        CHECK(x.node(k + 1)[0] == doctest::Approx(acc).epsilon(1e-15));
    }
}
