#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rageval/aggregation.hpp"
#include "rageval/corpus.hpp"
#include "rageval/metrics.hpp"
#include "rageval/stats.hpp"
#include "rageval/topicality.hpp"

namespace rageval::report {

using ojson = nlohmann::ordered_json;

// Evaluation ------------------------------------------------------------

/// Records (with their inputs, so later stages need no other file), per
/// metric status, score and judge evidence, then set means and failure counts.
ojson evaluation_json(const RecordSet& set, const SetEvaluation& eval, std::string_view models);

/// Set-level table (Models, Dataset, four metric means) plus one row per record.
std::string evaluation_text(const SetEvaluation& eval, std::string_view models);

/// A record and its usable scores as read back from an evaluation document.
struct ScoredRecord {
    EvalRecord record;
    std::array<std::optional<double>, 4> scores{};  // kAllMetrics order
};

struct EvaluationInput {
    std::string label;
    std::vector<ScoredRecord> records;
};

/// Throws MissingFieldError when a structural field (records, id, query,
/// answer, contexts, metrics) is absent or mistyped.
EvaluationInput read_evaluation(const nlohmann::json& doc);

// Aggregation -----------------------------------------------------------

struct AggregateRow {
    std::string id;
    MetricScores scores;
    AggregateScore aggregate;
    std::string enhanced;
};

/// `rows` in rank order.
ojson aggregate_json(std::string_view label, const std::vector<AggregateRow>& rows, std::string_view scorer,
                     double mean_logit);
std::string aggregate_text(std::string_view label, const std::vector<AggregateRow>& rows, std::string_view scorer,
                           double mean_logit);

// Bootstrap -------------------------------------------------------------

ojson summary_json(const stats::BootstrapSummary& s);

ojson bootstrap_json(std::string_view label, const stats::BootstrapSummary& summary,
                     const std::optional<stats::ConvergenceTrace>& trace,
                     const std::optional<stats::UnbiasednessReport>& unbiased);
std::string bootstrap_text(std::string_view label, const stats::BootstrapSummary& summary,
                           const std::optional<stats::ConvergenceTrace>& trace,
                           const std::optional<stats::UnbiasednessReport>& unbiased);

// Topicality ------------------------------------------------------------

ojson topicality_json(const TopicalityReport& report);

}  // namespace rageval::report
