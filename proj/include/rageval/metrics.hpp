#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rageval/corpus.hpp"
#include "rageval/judge.hpp"
#include "rageval/providers.hpp"

namespace rageval {

enum class MetricKind { Faithfulness, AnswerRelevance, RetrievalRecall, RetrievalPrecision };

inline constexpr std::array<MetricKind, 4> kAllMetrics{MetricKind::Faithfulness, MetricKind::AnswerRelevance,
                                                       MetricKind::RetrievalRecall,
                                                       MetricKind::RetrievalPrecision};

/// "faithfulness", "answer_relevance", "retrieval_recall", "retrieval_precision".
std::string_view metric_name(MetricKind kind) noexcept;
/// Column heading: "Faithfulness", "Relevance", "Recall", "Precision".
std::string_view metric_title(MetricKind kind) noexcept;
std::optional<MetricKind> metric_from_name(std::string_view name) noexcept;

enum class MetricStatus {
    Computed,
    Degenerate,  // defined fallback value (e.g. 0.0 for a record without contexts)
    Failed,      // provider or parse failure; excluded from means
    Skipped,     // not requested
};

std::string_view status_name(MetricStatus status) noexcept;

/// Score plus the evidence it was computed from. Diagnostics are populated
/// only for Computed/Degenerate results.
struct MetricResult {
    MetricStatus status = MetricStatus::Skipped;
    double score = 0.0;
    std::string error;                     // Failed only
    bool provider_failure = false;         // Failed because a backend call failed
    std::vector<std::string> transcripts;  // raw judge outputs
    std::vector<std::string> items;        // statements, sentences, candidates or questions
    std::vector<double> values;            // per-item verdicts (0/1) or similarities
    std::vector<std::string> notes;

    bool ok() const noexcept { return status == MetricStatus::Computed || status == MetricStatus::Degenerate; }
};

struct MetricVector {
    MetricResult faithfulness;
    MetricResult answer_relevance;
    MetricResult retrieval_recall;
    MetricResult retrieval_precision;

    const MetricResult& operator[](MetricKind kind) const noexcept;
    MetricResult& operator[](MetricKind kind) noexcept;

    std::optional<double> score(MetricKind kind) const noexcept;
    bool complete() const noexcept;  // all four usable
    bool all_failed() const noexcept;
};

struct SimilarityConfig {
    double precision_match_threshold = 0.8;
    std::size_t n_generated_questions = 3;

    void validate() const;
};

enum class RecallSource { Auto, GroundTruth, Answer };
enum class StatementStrategy { Sentences, WholeAnswer };

struct EvalConfig {
    SimilarityConfig similarity;
    GenerationParams generation;
    RecallSource recall_source = RecallSource::Auto;
    StatementStrategy statements = StatementStrategy::Sentences;
    std::size_t parallelism = 4;
};

// Scoring ---------------------------------------------------------------

/// u·v / (‖u‖‖v‖), 0 when either vector is zero. Throws MetricError on a
/// dimension mismatch.
double cosine(std::span<const double> u, std::span<const double> v);

double faithfulness_score(const judge::FaithfulnessVerdicts& v);
double recall_score(const judge::RecallClassification& c);

struct PrecisionDetail {
    double score = 0.0;
    std::vector<std::string> context_sentences;
    std::vector<double> best_similarity;  // per context sentence; 1 for exact matches
    bool degenerate = false;
};

/// Fraction of context sentences whose best cosine against any extracted
/// candidate reaches the threshold. Verbatim matches count without an
/// embedding call. Insufficient extractions and empty contexts score 0.
PrecisionDetail precision_detail(const judge::PrecisionExtraction& x, std::span<const std::string> contexts,
                                 const Embedder& embedder, const SimilarityConfig& cfg);
double precision_score(const judge::PrecisionExtraction& x, std::span<const std::string> contexts,
                       const Embedder& embedder, const SimilarityConfig& cfg);

/// Mean clamped cosine between the original query and each generated question.
double answer_relevance_score(std::string_view original_query, const judge::GeneratedQuestions& qs,
                              const Embedder& embedder);

// Orchestration ---------------------------------------------------------

struct RecordEvaluation {
    std::string id;
    MetricVector metrics;
    std::vector<std::string> warnings;
};

/// Runs every judge call for one record. Sub-metric failures are isolated in
/// their MetricResult; AuthError propagates.
RecordEvaluation evaluate_record(const EvalRecord& record, const Providers& providers, const EvalConfig& cfg);

struct SetEvaluation {
    std::string label;
    std::vector<RecordEvaluation> records;  // input order
    std::array<std::optional<double>, 4> means{};
    std::array<std::size_t, 4> failures{};  // failed records per metric
    std::size_t failed_records = 0;         // records with every metric failed

    std::optional<double> mean(MetricKind kind) const noexcept;
    std::size_t failure_count(MetricKind kind) const noexcept;
    /// Usable per-record values for one metric, in record order.
    std::vector<double> values(MetricKind kind) const;
};

/// Evaluates records with at most cfg.parallelism in flight. Throws SetError
/// for an empty set or when every record failed.
SetEvaluation evaluate_set(const RecordSet& set, const Providers& providers, const EvalConfig& cfg);

}  // namespace rageval
