#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "rageval/stats_kernels.hpp"

namespace {

std::vector<double> fixture(std::size_t n) {
    std::mt19937_64 rng(42);
    std::gamma_distribution<double> a(2.0), b(5.0);
    std::vector<double> out(n);
    for (auto& x : out) {
        const double u = a(rng);
        x = u / (u + b(rng));
    }
    return out;
}

void BM_ResampleMeansSerial(benchmark::State& state) {
    const auto values = fixture(static_cast<std::size_t>(state.range(0)));
    const auto resamples = static_cast<std::size_t>(state.range(1));
    for (auto _ : state) {
        auto means = rageval::stats::kernels::resample_means_serial(values, values.size(), resamples, 7);
        benchmark::DoNotOptimize(means.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

void BM_ResampleMeansParallel(benchmark::State& state) {
    const auto values = fixture(static_cast<std::size_t>(state.range(0)));
    const auto resamples = static_cast<std::size_t>(state.range(1));
    for (auto _ : state) {
        auto means = rageval::stats::kernels::resample_means_parallel(values, values.size(), resamples, 7);
        benchmark::DoNotOptimize(means.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

}  // namespace

BENCHMARK(BM_ResampleMeansSerial)->Args({50, 1000})->Args({50, 5000})->Args({200, 5000})->Args({1000, 10000});
BENCHMARK(BM_ResampleMeansParallel)->Args({50, 1000})->Args({50, 5000})->Args({200, 5000})->Args({1000, 10000});

BENCHMARK_MAIN();
