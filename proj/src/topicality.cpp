#include "rageval/topicality.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <fmt/format.h>

#include "parallel.hpp"
#include "rageval/error.hpp"

namespace rageval {

namespace {

std::size_t slot(MetricKind kind) { return static_cast<std::size_t>(kind); }

std::size_t columns_of(std::string_view s) {
    // Counts code points so "±" occupies one column.
    return static_cast<std::size_t>(
        std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::string pad(std::string_view s, std::size_t width) {
    std::string out(s);
    const auto columns = columns_of(s);
    if (columns < width) {
        out.append(width - columns, ' ');
    }
    return out;
}

}  // namespace

const stats::BootstrapSummary& QuerySetResult::summary(MetricKind kind) const noexcept {
    return summaries[slot(kind)];
}

Comparison compare_summaries(const stats::BootstrapSummary& a, const stats::BootstrapSummary& b, double min_effect) {
    if (a.ci_level != b.ci_level) {
        throw StatsError(fmt::format("cannot compare intervals at ci levels {} and {}", a.ci_level, b.ci_level));
    }
    Comparison out;
    out.delta = a.boot_mean - b.boot_mean;
    out.overlap = a.ci_low <= b.ci_high && b.ci_low <= a.ci_high;
    out.separated = !out.overlap && std::abs(out.delta) >= min_effect;
    return out;
}

const Comparison* TopicalityReport::find(std::string_view a, std::string_view b, MetricKind metric) const noexcept {
    for (const auto& c : comparisons) {
        if (c.metric == metric && ((c.set_a == a && c.set_b == b) || (c.set_a == b && c.set_b == a))) {
            return &c;
        }
    }
    return nullptr;
}

std::string TopicalityReport::render_text() const {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"Models", "QuerySet"});
    for (const auto kind : kAllMetrics) {
        rows.front().emplace_back(metric_title(kind));
    }
    for (const auto& set : set_results) {
        std::vector<std::string> row{models.empty() ? "-" : models, set.label};
        for (const auto kind : kAllMetrics) {
            const auto& s = set.summary(kind);
            row.push_back(fmt::format("{:.2f}±{:.2f}", s.boot_mean, s.half_width()));
        }
        rows.push_back(std::move(row));
    }

    std::vector<std::size_t> widths(rows.front().size(), 0);
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            widths[c] = std::max(widths[c], columns_of(row[c]));
        }
    }

    std::string out;
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            line += c + 1 < row.size() ? pad(row[c], widths[c] + 2) : row[c];
        }
        out += line + "\n";
    }

    out += fmt::format("\nbootstrap: B={} resample_size={} seed={} ci_level={}; separation needs disjoint CIs and "
                       "|delta| >= {}\n\n",
                       bootstrap.resamples,
                       bootstrap.resample_size ? std::to_string(*bootstrap.resample_size) : std::string("n"),
                       bootstrap.seed, bootstrap.ci_level, min_effect);
    for (const auto& c : comparisons) {
        std::string line = fmt::format("{} vs {}  {:<19}  delta {:+.4f}  {}", c.set_a, c.set_b, metric_name(c.metric),
                                       c.delta, c.separated ? "separated" : "not separated");
        if (c.overlap) {
            line += " (CIs overlap)";
        }
        if (c.metric == MetricKind::Faithfulness) {
            line += " [non-discriminative expected]";
        }
        out += line + "\n";
    }
    for (const auto& set : set_results) {
        for (const auto kind : kAllMetrics) {
            for (const auto& w : set.summary(kind).warnings) {
                out += fmt::format("warning: {} {}: {}\n", set.label, metric_name(kind), w);
            }
        }
    }
    return out;
}

TopicalityReport summarize_sets(const std::vector<SetEvaluation>& sets, const stats::BootstrapConfig& boot,
                                const TopicalityConfig& cfg, std::string models) {
    if (sets.size() < 2) {
        throw ConfigError("topicality needs at least two query sets, got " + std::to_string(sets.size()));
    }
    if (!(cfg.min_effect >= 0.0)) {
        throw ConfigError("min_effect must be non-negative");
    }
    boot.validate();

    TopicalityReport report;
    report.models = std::move(models);
    report.bootstrap = boot;
    report.min_effect = cfg.min_effect;
    for (const auto& set : sets) {
        QuerySetResult result;
        result.label = set.label;
        for (const auto kind : kAllMetrics) {
            auto values = set.values(kind);
            if (values.empty()) {
                throw SetError("query set '" + set.label + "' has no usable " + std::string(metric_name(kind)) +
                               " values");
            }
            result.summaries[slot(kind)] = stats::bootstrap_summary(values, boot, false, cfg.bootstrap_threads);
            result.values[slot(kind)] = std::move(values);
            result.failures[slot(kind)] = set.failure_count(kind);
        }
        report.set_results.push_back(std::move(result));
    }

    for (std::size_t i = 0; i < report.set_results.size(); ++i) {
        for (std::size_t j = i + 1; j < report.set_results.size(); ++j) {
            const auto& a = report.set_results[i];
            const auto& b = report.set_results[j];
            for (const auto kind : kAllMetrics) {
                auto c = compare_summaries(a.summary(kind), b.summary(kind), cfg.min_effect);
                c.set_a = a.label;
                c.set_b = b.label;
                c.metric = kind;
                report.comparisons.push_back(std::move(c));
            }
        }
    }
    return report;
}

TopicalityReport run_topicality(const std::vector<RecordSet>& sets, const Providers& providers,
                                const EvalConfig& eval, const stats::BootstrapConfig& boot,
                                const TopicalityConfig& cfg) {
    if (sets.size() < 2) {
        throw ConfigError("topicality needs at least two query sets, got " + std::to_string(sets.size()));
    }
    boot.validate();

    std::vector<std::optional<SetEvaluation>> evaluated(sets.size());
    detail::parallel_for(sets.size(), eval.parallelism, [&](std::size_t i) {
        try {
            evaluated[i] = evaluate_set(sets[i], providers, eval);
        } catch (const SetError& e) {
            throw SetError("query set '" + sets[i].label() + "' failed: " + e.what(), e.provider_failure());
        }
    });

    std::vector<SetEvaluation> done;
    done.reserve(sets.size());
    for (auto& e : evaluated) {
        done.push_back(std::move(*e));
    }
    std::string models;
    if (providers.generator) {
        models = providers.generator->identifier();
    }
    if (providers.embedder) {
        models += (models.empty() ? "" : " + ") + providers.embedder->identifier();
    }
    return summarize_sets(done, boot, cfg, std::move(models));
}

}  // namespace rageval
