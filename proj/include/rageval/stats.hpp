#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rageval/random.hpp"

namespace rageval::stats {

inline constexpr std::size_t kMinSampleSize = 30;
inline constexpr std::size_t kMinResamples = 1000;

struct BootstrapConfig {
    std::size_t resamples = 1000;               // B
    std::optional<std::size_t> resample_size;   // defaults to n
    std::uint64_t seed = 0;
    double ci_level = 0.95;

    /// Throws StatsError for B < 2, resample_size 0 or ci_level outside (0,1).
    void validate() const;
};

struct BootstrapSummary {
    double empirical_mean = 0.0;
    double boot_mean = 0.0;
    double boot_variance = 0.0;  // variance of resample means, (B-1) denominator
    double ci_low = 0.0;
    double ci_high = 0.0;
    double ci_level = 0.95;
    std::size_t resamples = 0;
    std::size_t n = 0;
    std::size_t resample_size = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;
    std::optional<std::vector<double>> resample_means;

    double standard_error() const noexcept;
    double half_width() const noexcept { return (ci_high - ci_low) / 2.0; }
};

/// `size` uniform draws with replacement. Throws StatsError on empty input.
std::vector<double> resample(std::span<const double> values, std::size_t size, random::Engine& rng);

/// Sample-size and resample-count guidance: one message when n < 30, one
/// when B < 1000.
std::vector<std::string> bootstrap_warnings(std::size_t n, std::size_t resamples);

/// Linear-interpolation quantile at rank p(n-1) of the sorted values.
double percentile(std::span<const double> values, double p);

/// Resample s draws from random::Engine(random::mix_seed(cfg.seed, s)), so
/// the summary is identical for any `threads`. threads = 0 uses the OpenMP
/// default, 1 runs the serial kernel.
BootstrapSummary bootstrap_summary(std::span<const double> values, const BootstrapConfig& cfg,
                                   bool retain_means = false, int threads = 0);

struct ConvergencePoint {
    std::size_t resamples = 0;
    double std_error = 0.0;
};

struct ConvergenceTrace {
    std::vector<ConvergencePoint> points;
    double final_relative_change = 0.0;
    bool converged = false;  // final relative change below 1%
};

inline constexpr double kConvergenceThreshold = 0.01;

/// Standard deviation of the first B_i resample means for each checkpoint,
/// all drawn from one seed stream. Throws StatsError with fewer than two
/// checkpoints or when they are not strictly ascending.
ConvergenceTrace convergence_trace(std::span<const double> values, const BootstrapConfig& cfg,
                                   std::span<const std::size_t> checkpoints, int threads = 0);

struct UnbiasednessReport {
    double empirical_mean = 0.0;
    double boot_mean = 0.0;
    double delta = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// |M̄ - sample mean| against `tolerance`, default 3·(sd/√n)/√B with the
/// n-1 sample sd. Resamples must have size n; otherwise StatsError.
UnbiasednessReport unbiasedness_check(std::span<const double> values, const BootstrapConfig& cfg,
                                      std::optional<double> tolerance = std::nullopt, int threads = 0);

}  // namespace rageval::stats
