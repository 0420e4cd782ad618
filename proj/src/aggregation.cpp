#include "rageval/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "rageval/error.hpp"
#include "rageval/templates.hpp"
#include "rageval/text.hpp"

namespace rageval {

namespace {

struct StatementSlot {
    std::string_view asset;
    std::string_view metric;
    double MetricScores::*field;
};

// Rendering order of the relevance statements.
constexpr StatementSlot kStatements[] = {
    {templates::kStatementAnswerRelevancy, "answer_relevance", &MetricScores::answer_relevance},
    {templates::kStatementContextPrecision, "retrieval_precision", &MetricScores::retrieval_precision},
    {templates::kStatementContextRecall, "retrieval_recall", &MetricScores::retrieval_recall},
    {templates::kStatementFaithfulness, "faithfulness", &MetricScores::faithfulness},
};

// Text of a statement up to its score slot, e.g. "...the faithfulness score is: ".
std::string_view score_prefix(std::string_view statement) {
    const auto slot = statement.find("{score}");
    const auto sentence = statement.substr(0, slot);
    const auto start = sentence.rfind(". For the given ");
    return sentence.substr(start == std::string_view::npos ? 0 : start + 2);
}

}  // namespace

EnhancedAnswer enhance_answer(const EvalRecord& record, const MetricScores& scores, bool contexts_included) {
    std::vector<std::string> paragraphs;
    paragraphs.push_back(text::render(templates::get(templates::kEnhancedPreamble), {{"answer", record.answer}}));
    if (contexts_included) {
        paragraphs.push_back(text::render(templates::get(templates::kEnhancedContext),
                                          {{"contexts", text::python_list_repr(record.contexts)}}));
    }
    for (const auto& s : kStatements) {
        paragraphs.push_back(
            text::render(templates::get(s.asset), {{"score", text::format_score(scores.*(s.field))}}));
    }

    EnhancedAnswer out;
    out.original_answer = record.answer;
    out.statement_scores = scores;
    for (std::size_t i = 0; i < paragraphs.size(); ++i) {
        if (i > 0) {
            out.rendered += "\n\n";
        }
        out.rendered += paragraphs[i];
    }
    return out;
}

EnhancedAnswer enhance_answer(const EvalRecord& record, const MetricVector& metrics, bool contexts_included) {
    MetricScores scores;
    for (const auto kind : kAllMetrics) {
        const auto value = metrics.score(kind);
        if (!value) {
            throw MissingFieldError("record '" + record.id + "' has no usable " + std::string(metric_name(kind)) +
                                   " score");
        }
        switch (kind) {
            case MetricKind::Faithfulness: scores.faithfulness = *value; break;
            case MetricKind::AnswerRelevance: scores.answer_relevance = *value; break;
            case MetricKind::RetrievalRecall: scores.retrieval_recall = *value; break;
            case MetricKind::RetrievalPrecision: scores.retrieval_precision = *value; break;
        }
    }
    return enhance_answer(record, scores, contexts_included);
}

MetricScores read_rendered_scores(std::string_view rendered) {
    MetricScores out;
    for (const auto& s : kStatements) {
        const auto prefix = score_prefix(templates::get(s.asset));
        const auto pos = rendered.rfind(prefix);
        if (pos == std::string_view::npos) {
            throw AggregationError("enhanced answer has no " + std::string(s.metric) + " statement");
        }
        auto rest = rendered.substr(pos + prefix.size());
        const auto end = rest.find_first_not_of("0123456789.eE+-");
        auto number = rest.substr(0, end);
        // A sentence-final period is not part of the number.
        while (!number.empty() && number.back() == '.') {
            number.remove_suffix(1);
        }
        const auto value = text::parse_double(number);
        if (!value) {
            throw AggregationError("enhanced answer has an unreadable " + std::string(s.metric) + " score '" +
                                   std::string(number) + "'");
        }
        out.*(s.field) = *value;
    }
    return out;
}

double expit(double logit) noexcept {
    if (logit >= 0.0) {
        return 1.0 / (1.0 + std::exp(-logit));
    }
    const double e = std::exp(logit);
    return e / (1.0 + e);
}

AggregateScore aggregate(const EvalRecord& record, const EnhancedAnswer& enhanced, const PairScorer& scorer) {
    double logit = 0.0;
    try {
        logit = scorer.score(record.query, enhanced.rendered);
    } catch (const AuthError&) {
        throw;
    } catch (const std::exception& e) {
        throw AggregationError("pair scorer failed for record '" + record.id + "': " + e.what());
    }
    if (!std::isfinite(logit)) {
        throw AggregationError("pair scorer returned a non-finite logit for record '" + record.id + "'");
    }
    return AggregateScore{logit, expit(logit)};
}

std::vector<RankedRecord> rank_records(std::vector<RankedRecord> scores) {
    std::sort(scores.begin(), scores.end(), [](const RankedRecord& a, const RankedRecord& b) {
        if (a.score.logit != b.score.logit) {
            return a.score.logit > b.score.logit;
        }
        return a.id < b.id;
    });
    return scores;
}

}  // namespace rageval
