#include <benchmark/benchmark.h>

#include "funcito/catalog.hpp"
#include "funcito/functional.hpp"
#include "funcito/rng.hpp"

using namespace funcito;

namespace {

Path noisy_path(const TimeGrid& grid) {
    const CounterRng rng(1, 0);
    std::vector<double> vals(grid.n_nodes());
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = rng.normal(i);
    return Path(grid, 1, std::move(vals));
}

void bm_vertical_derivative_fd(benchmark::State& state) {
    const TimeGrid grid(1.0, state.range(0));
    const Functional u =
        make_functional("running_integral", Json{{"rho", 0.8}, {"analytic", false}}, 1);
    const Path x = noisy_path(grid);
    for (auto _ : state) {
        benchmark::DoNotOptimize(vertical_derivative(u, 0.5, x, {1.0}));
    }
}
BENCHMARK(bm_vertical_derivative_fd)->Arg(256)->Arg(1024);

void bm_trace_term_stencil(benchmark::State& state) {
    const TimeGrid grid(1.0, 256);
    Functional u = make_functional("cylinder", Json{{"form", "sin_exp"}}, 1);
    u.second_vertical = nullptr;
    const Path x = noisy_path(grid);
    Matrix phi(1, 1);
    phi(0, 0) = 0.3;
    const BasisSpec basis(1, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(trace_term(u, 0.5, x, phi, basis));
    }
}
BENCHMARK(bm_trace_term_stencil);

void bm_left_time_derivative(benchmark::State& state) {
    const TimeGrid grid(1.0, 256);
    Functional u = make_functional("running_integral", Json{{"rho", 0.8}}, 1);
    u.left_time = nullptr;
    const Path x = noisy_path(grid);
    const FDScheme scheme{.order = FDOrder::Richardson};
    for (auto _ : state) {
        benchmark::DoNotOptimize(left_time_derivative(u, 0.5, x, scheme));
    }
}
BENCHMARK(bm_left_time_derivative);

}  // namespace
