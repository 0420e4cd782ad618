#include "rageval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rageval/error.hpp"
#include "rageval/stats_kernels.hpp"

namespace rageval::stats {

namespace {

void check_values(std::span<const double> values) {
    if (values.empty()) {
        throw StatsError("bootstrap needs at least one value");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw StatsError("value " + std::to_string(i) + " is not finite");
        }
    }
}

std::vector<double> means_for(std::span<const double> values, std::size_t size, std::size_t resamples,
                              std::uint64_t seed, int threads) {
    if (threads == 1) {
        return kernels::resample_means_serial(values, size, resamples, seed);
    }
    return kernels::resample_means_parallel(values, size, resamples, seed, threads);
}

double mean_of(std::span<const double> xs) {
    const double shift = xs[0];
    double sum = 0.0;
    for (const double x : xs) {
        sum += x - shift;
    }
    return shift + sum / static_cast<double>(xs.size());
}

// Sample variance with n-1 denominator.
double variance_of(std::span<const double> xs, double mean) {
    double ss = 0.0;
    for (const double x : xs) {
        ss += (x - mean) * (x - mean);
    }
    return ss / static_cast<double>(xs.size() - 1);
}

}  // namespace

void BootstrapConfig::validate() const {
    if (resamples < 2) {
        throw StatsError("bootstrap needs B >= 2 resamples; the variance of resample means is undefined for B = " +
                         std::to_string(resamples));
    }
    if (resample_size && *resample_size == 0) {
        throw StatsError("resample_size must be positive");
    }
    if (!(ci_level > 0.0 && ci_level < 1.0)) {
        throw StatsError("ci_level must lie in (0, 1)");
    }
}

double BootstrapSummary::standard_error() const noexcept { return std::sqrt(boot_variance); }

std::vector<double> resample(std::span<const double> values, std::size_t size, random::Engine& rng) {
    if (values.empty()) {
        throw StatsError("cannot resample an empty value list");
    }
    std::vector<double> out(size);
    for (auto& x : out) {
        x = values[random::uniform_index(rng, values.size())];
    }
    return out;
}

std::vector<std::string> bootstrap_warnings(std::size_t n, std::size_t resamples) {
    std::vector<std::string> out;
    if (n < kMinSampleSize) {
        out.push_back("sample size n = " + std::to_string(n) + " is below 30; at least 30 and ideally 50 are advised");
    }
    if (resamples < kMinResamples) {
        out.push_back("resample count B = " + std::to_string(resamples) +
                      " is below 1000; between 1000 and 5000 are advised");
    }
    return out;
}

double percentile(std::span<const double> values, double p) {
    if (values.empty()) {
        throw StatsError("percentile of an empty list");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw StatsError("percentile rank must lie in [0, 1]");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double rank = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = rank - static_cast<double>(lo);
    if (frac == 0.0 || sorted[lo] == sorted[hi]) {
        return sorted[lo];
    }
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BootstrapSummary bootstrap_summary(std::span<const double> values, const BootstrapConfig& cfg, bool retain_means,
                                   int threads) {
    cfg.validate();
    check_values(values);

    BootstrapSummary out;
    out.n = values.size();
    out.resamples = cfg.resamples;
    out.resample_size = cfg.resample_size.value_or(values.size());
    out.seed = cfg.seed;
    out.ci_level = cfg.ci_level;
    out.warnings = bootstrap_warnings(out.n, out.resamples);
    out.empirical_mean = mean_of(values);

    auto means = means_for(values, out.resample_size, out.resamples, out.seed, threads);
    out.boot_mean = mean_of(means);
    out.boot_variance = variance_of(means, out.boot_mean);
    const double tail = (1.0 - cfg.ci_level) / 2.0;
    out.ci_low = percentile(means, tail);
    out.ci_high = percentile(means, 1.0 - tail);
    if (retain_means) {
        out.resample_means = std::move(means);
    }
    return out;
}

ConvergenceTrace convergence_trace(std::span<const double> values, const BootstrapConfig& cfg,
                                   std::span<const std::size_t> checkpoints, int threads) {
    check_values(values);
    if (checkpoints.size() < 2) {
        throw StatsError("convergence trace needs at least two checkpoints");
    }
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] < 2) {
            throw StatsError("checkpoint B = " + std::to_string(checkpoints[i]) + " is below 2");
        }
        if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) {
            throw StatsError("checkpoints must be strictly ascending");
        }
    }
    BootstrapConfig probe = cfg;
    probe.resamples = checkpoints.back();
    probe.validate();

    const auto size = cfg.resample_size.value_or(values.size());
    const auto means = means_for(values, size, checkpoints.back(), cfg.seed, threads);

    ConvergenceTrace out;
    for (const auto b : checkpoints) {
        const std::span<const double> head(means.data(), b);
        out.points.push_back({b, std::sqrt(variance_of(head, mean_of(head)))});
    }
    const double prev = out.points[out.points.size() - 2].std_error;
    const double last = out.points.back().std_error;
    out.final_relative_change = prev == 0.0 ? (last == 0.0 ? 0.0 : INFINITY) : std::abs(last - prev) / prev;
    out.converged = out.final_relative_change < kConvergenceThreshold;
    return out;
}

UnbiasednessReport unbiasedness_check(std::span<const double> values, const BootstrapConfig& cfg,
                                      std::optional<double> tolerance, int threads) {
    check_values(values);
    if (cfg.resample_size && *cfg.resample_size != values.size()) {
        throw StatsError("unbiasedness check assumes resamples of size n = " + std::to_string(values.size()) +
                         ", got resample_size " + std::to_string(*cfg.resample_size));
    }
    const auto summary = bootstrap_summary(values, cfg, false, threads);

    UnbiasednessReport out;
    out.empirical_mean = summary.empirical_mean;
    out.boot_mean = summary.boot_mean;
    out.delta = std::abs(summary.boot_mean - summary.empirical_mean);
    if (tolerance) {
        out.tolerance = *tolerance;
    } else {
        const double sd = values.size() > 1 ? std::sqrt(variance_of(values, summary.empirical_mean)) : 0.0;
        out.tolerance = 3.0 * (sd / std::sqrt(static_cast<double>(values.size()))) /
                        std::sqrt(static_cast<double>(cfg.resamples));
    }
    out.pass = out.delta <= out.tolerance;
    return out;
}

}  // namespace rageval::stats
