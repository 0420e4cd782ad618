#include "rageval/stats_kernels.hpp"

#include <omp.h>

#include "rageval/random.hpp"

namespace rageval::stats::kernels {

namespace {

double one_resample_mean(std::span<const double> values, std::size_t size, std::uint64_t seed, std::size_t s) {
    random::Engine rng(random::mix_seed(seed, s));
    const double shift = values[0];
    double sum = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        sum += values[random::uniform_index(rng, values.size())] - shift;
    }
    return shift + sum / static_cast<double>(size);
}

}  // namespace

std::vector<double> resample_means_serial(std::span<const double> values, std::size_t size, std::size_t resamples,
                                          std::uint64_t seed) {
    std::vector<double> means(resamples);
    for (std::size_t s = 0; s < resamples; ++s) {
        means[s] = one_resample_mean(values, size, seed, s);
    }
    return means;
}

std::vector<double> resample_means_parallel(std::span<const double> values, std::size_t size,
                                            std::size_t resamples, std::uint64_t seed, int threads) {
    std::vector<double> means(resamples);
    const int team = threads > 0 ? threads : omp_get_max_threads();
    const auto count = static_cast<std::int64_t>(resamples);
#pragma omp parallel for num_threads(team) schedule(static)
    for (std::int64_t s = 0; s < count; ++s) {
        means[static_cast<std::size_t>(s)] = one_resample_mean(values, size, seed, static_cast<std::size_t>(s));
    }
    return means;
}

}  // namespace rageval::stats::kernels
