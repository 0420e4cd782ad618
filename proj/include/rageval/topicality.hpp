#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "rageval/corpus.hpp"
#include "rageval/metrics.hpp"
#include "rageval/stats.hpp"

namespace rageval {

struct TopicalityConfig {
    double min_effect = 0.1;
    int bootstrap_threads = 0;
};

/// One query set: its per-metric values and their bootstrap summaries, all
/// produced with the same BootstrapConfig.
struct QuerySetResult {
    std::string label;
    std::array<std::vector<double>, 4> values;
    std::array<stats::BootstrapSummary, 4> summaries;
    std::array<std::size_t, 4> failures{};

    const stats::BootstrapSummary& summary(MetricKind kind) const noexcept;
};

struct Comparison {
    std::string set_a;
    std::string set_b;
    MetricKind metric = MetricKind::Faithfulness;
    double delta = 0.0;  // a.boot_mean - b.boot_mean
    bool overlap = false;
    bool separated = false;
};

/// Delta, CI overlap and verdict: separated iff the intervals are disjoint
/// and |delta| >= min_effect. Throws StatsError when the ci levels differ.
Comparison compare_summaries(const stats::BootstrapSummary& a, const stats::BootstrapSummary& b, double min_effect);

struct TopicalityReport {
    std::string models;  // generator + embedder identifiers
    stats::BootstrapConfig bootstrap;
    double min_effect = 0.1;
    std::vector<QuerySetResult> set_results;
    std::vector<Comparison> comparisons;  // set pairs in input order, metrics in kAllMetrics order

    /// Either argument order matches; delta keeps the stored orientation.
    const Comparison* find(std::string_view a, std::string_view b, MetricKind metric) const noexcept;

    /// Aligned table with one "m±e" cell per set and metric (e = half the CI
    /// width) followed by the pairwise verdicts.
    std::string render_text() const;
};

/// Summarizes already evaluated sets and compares every unordered pair on
/// every metric. Throws SetError naming a set with no usable value for a
/// metric, ConfigError for fewer than two sets.
TopicalityReport summarize_sets(const std::vector<SetEvaluation>& sets, const stats::BootstrapConfig& boot,
                                const TopicalityConfig& cfg, std::string models = {});

/// Evaluates each set (concurrently, up to eval.parallelism) and then
/// summarizes them. A set that fails entirely raises SetError naming it.
TopicalityReport run_topicality(const std::vector<RecordSet>& sets, const Providers& providers,
                                const EvalConfig& eval, const stats::BootstrapConfig& boot,
                                const TopicalityConfig& cfg = {});

}  // namespace rageval
