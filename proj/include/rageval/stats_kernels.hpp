#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rageval::stats::kernels {

/// Means of `resamples` bootstrap resamples of size `size`. Slot s holds the
/// mean of resample s. Each mean is accumulated as deviations from
/// values[0], so constant inputs reproduce the constant exactly.
std::vector<double> resample_means_serial(std::span<const double> values, std::size_t size, std::size_t resamples,
                                          std::uint64_t seed);

/// Same contract, resamples spread over OpenMP threads. Bit-identical to the
/// serial kernel. threads = 0 uses the OpenMP default.
std::vector<double> resample_means_parallel(std::span<const double> values, std::size_t size,
                                            std::size_t resamples, std::uint64_t seed, int threads = 0);

}  // namespace rageval::stats::kernels
