#include <benchmark/benchmark.h>

#include "funcito/catalog.hpp"
#include "funcito/sde.hpp"

using namespace funcito;

namespace {

void bm_sample_noise(benchmark::State& state) {
    const TimeGrid grid(1.0, state.range(0));
    std::uint64_t stream = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_noise(grid, 1, 42, stream++));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_sample_noise)->Arg(256)->Arg(1024);

void bm_euler_maruyama_ou(benchmark::State& state) {
    const TimeGrid grid(1.0, state.range(0));
    const CoefficientSet coeffs =
        make_drift("linear", Json{{"kappa", 1.0}}, RadonMeasure::dirac(grid, 0.0), 1)
            .to_coefficients([] {
                Matrix b(1, 1);
                b(0, 0) = 0.3;
                return b;
            }());
    ItoProcessSpec spec;
    spec.initial = Path::constant(grid, {1.0});
    std::uint64_t stream = 0;
    for (auto _ : state) {
        const NoiseBundle noise = sample_noise(grid, 1, 7, stream++);
        benchmark::DoNotOptimize(euler_maruyama(spec, coeffs, noise));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_euler_maruyama_ou)->Arg(256)->Arg(1024);

void bm_euler_maruyama_delay(benchmark::State& state) {
    const TimeGrid grid(1.0, state.range(0));
    const CoefficientSet coeffs =
        make_drift("linear", Json{{"kappa", 0.8}}, RadonMeasure::dirac(grid, 0.25), 1)
            .to_coefficients([] {
                Matrix b(1, 1);
                b(0, 0) = 0.3;
                return b;
            }());
    ItoProcessSpec spec;
    spec.initial = Path::constant(grid, {1.0});
    std::uint64_t stream = 0;
    for (auto _ : state) {
        const NoiseBundle noise = sample_noise(grid, 1, 9, stream++);
        benchmark::DoNotOptimize(euler_maruyama(spec, coeffs, noise));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_euler_maruyama_delay)->Arg(256)->Arg(1024);

}  // namespace
