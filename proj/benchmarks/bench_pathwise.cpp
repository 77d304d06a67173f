#include <benchmark/benchmark.h>

#include "funcito/catalog.hpp"
#include "funcito/sensitivities.hpp"

using namespace funcito;

namespace {

Matrix sigma_matrix() {
    Matrix b(1, 1);
    b(0, 0) = 0.3;
    return b;
}

void bm_picard_solve(benchmark::State& state) {
    const TimeGrid grid(1.0, state.range(0));
    const ConvolutionDrift drift =
        make_drift("linear", Json{{"kappa", 1.0}}, RadonMeasure::dirac(grid, 0.25), 1);
    const Path x0 = Path::constant(grid, {1.0});
    const NoiseBundle noise = sample_noise(grid, 1, 3, 0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_sde_pathwise(0.0, x0, drift, sigma_matrix(), noise));
    }
}
BENCHMARK(bm_picard_solve)->Arg(128)->Arg(512);

void bm_picard_solve_lebesgue(benchmark::State& state) {
    const TimeGrid grid(1.0, state.range(0));
    const ConvolutionDrift drift =
        make_drift("linear", Json{{"kappa", 1.0}}, RadonMeasure::lebesgue(grid), 1);
    const Path x0 = Path::constant(grid, {1.0});
    const NoiseBundle noise = sample_noise(grid, 1, 5, 0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_sde_pathwise(0.0, x0, drift, sigma_matrix(), noise));
    }
}
BENCHMARK(bm_picard_solve_lebesgue)->Arg(128)->Arg(256);

void bm_neumann_first_derivative(benchmark::State& state) {
    const TimeGrid grid(1.0, state.range(0));
    const ConvolutionDrift drift =
        make_drift("smooth_nonlinear", Json::object(), RadonMeasure::dirac(grid, 0.25), 1);
    const Path x0 = Path::constant(grid, {0.2});
    const NoiseBundle noise = sample_noise(grid, 1, 7, 0);
    const DerivativeContext dctx =
        make_derivative_context(0.0, x0, drift, sigma_matrix(), noise);
    const Path v = Path::constant(grid, {1.0});
    for (auto _ : state) {
        benchmark::DoNotOptimize(first_derivative(dctx, v));
    }
}
BENCHMARK(bm_neumann_first_derivative)->Arg(128)->Arg(512);

}  // namespace
