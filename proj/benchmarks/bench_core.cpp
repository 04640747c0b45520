#include <benchmark/benchmark.h>

#include <cmath>

#include "boasbuck/moments.hpp"
#include "boasbuck/operators.hpp"
#include "boasbuck/series.hpp"
#include "boasbuck/special.hpp"
#include "boasbuck/system.hpp"

namespace {

void BM_series_compose(benchmark::State& state) {
    const int order = static_cast<int>(state.range(0));
    boasbuck::TruncatedSeries outer = boasbuck::TruncatedSeries::exponential(order);
    std::vector<double> inner_coeffs(static_cast<std::size_t>(order) + 1, 0.0);
    for (int j = 1; j <= order; ++j) {
        inner_coeffs[static_cast<std::size_t>(j)] = 1.0 / (j * j + 1.0);
    }
    boasbuck::TruncatedSeries inner(std::move(inner_coeffs));
    for (auto _ : state) {
        benchmark::DoNotOptimize(boasbuck::series_compose(outer, inner));
    }
}
BENCHMARK(BM_series_compose)->Arg(64)->Arg(256);

void BM_weight_distribution(benchmark::State& state) {
    const boasbuck::BoasBuckSystem sys = boasbuck::make_exp_cubic_system();
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(boasbuck::weight_distribution(sys, n, 2.0, 1e-12));
    }
}
BENCHMARK(BM_weight_distribution)->Arg(10)->Arg(160)->Arg(640);

void BM_beta_prime_expectation(benchmark::State& state) {
    boasbuck::QuadratureSpec quad;
    const int j = static_cast<int>(state.range(0));
    const auto f = [](double s) { return std::exp(-s); };
    for (auto _ : state) {
        benchmark::DoNotOptimize(boasbuck::beta_prime_expectation(f, j, 160, quad));
    }
}
BENCHMARK(BM_beta_prime_expectation)->Arg(2)->Arg(80)->Arg(400);

void BM_apply_durrmeyer(benchmark::State& state) {
    const boasbuck::BoasBuckSystem sys = boasbuck::make_exp_quadratic_system();
    boasbuck::OperatorConfig cfg;
    cfg.n = static_cast<int>(state.range(0));
    const auto f = [](double s) { return std::exp(-s); };
    for (auto _ : state) {
        benchmark::DoNotOptimize(boasbuck::apply_durrmeyer(sys, cfg, f, 1.0));
    }
}
BENCHMARK(BM_apply_durrmeyer)->Arg(10)->Arg(80)->Arg(320);

void BM_central_moments(benchmark::State& state) {
    const boasbuck::BoasBuckSystem sys = boasbuck::make_exp_cubic_system();
    for (auto _ : state) {
        benchmark::DoNotOptimize(boasbuck::central_moments(sys, 160, 2.0));
    }
}
BENCHMARK(BM_central_moments);

} // namespace

BENCHMARK_MAIN();
