#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rageval/corpus.hpp"
#include "rageval/metrics.hpp"
#include "rageval/providers.hpp"

namespace rageval {

/// The four metric values injected into an enhanced answer.
struct MetricScores {
    double faithfulness = 0.0;
    double answer_relevance = 0.0;
    double retrieval_recall = 0.0;
    double retrieval_precision = 0.0;

    bool operator==(const MetricScores&) const = default;
};

/// Answer text followed by relevance statements that describe each metric
/// and carry its score.
struct EnhancedAnswer {
    std::string original_answer;
    std::string rendered;
    MetricScores statement_scores;
};

struct AggregateScore {
    double logit = 0.0;
    double normalized = 0.5;  // expit(logit)
};

/// Default cross-encoder model id for http pair scorers.
inline constexpr std::string_view kDefaultScorerModel = "ms-marco-MiniLM-L-12-v2";

/// Renders, separated by blank lines: the actual-answer preamble, the
/// optional context block (contexts as a Python-style list literal), then the
/// answer relevancy, context precision, context recall and faithfulness
/// statements. Scores are written at full round-trip precision.
EnhancedAnswer enhance_answer(const EvalRecord& record, const MetricScores& scores, bool contexts_included = true);

/// Throws MissingFieldError naming the first metric that is not usable.
EnhancedAnswer enhance_answer(const EvalRecord& record, const MetricVector& metrics, bool contexts_included = true);

/// Reads the four scores back from rendered statements (last occurrence of
/// each). Throws AggregationError naming a missing or unparseable metric.
MetricScores read_rendered_scores(std::string_view rendered);

/// 1 / (1 + e^-x), evaluated without overflow for large |x|.
double expit(double logit) noexcept;

/// Scores (query, enhanced answer) with the pair scorer. Throws
/// AggregationError when the scorer fails or returns a non-finite value.
AggregateScore aggregate(const EvalRecord& record, const EnhancedAnswer& enhanced, const PairScorer& scorer);

struct RankedRecord {
    std::string id;
    AggregateScore score;
};

/// Descending by logit; equal logits fall back to ascending record id.
std::vector<RankedRecord> rank_records(std::vector<RankedRecord> scores);

}  // namespace rageval
