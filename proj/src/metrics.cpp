#include "rageval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <utility>

#include "parallel.hpp"
#include "rageval/error.hpp"
#include "rageval/text.hpp"

namespace rageval {

std::string_view metric_name(MetricKind kind) noexcept {
    switch (kind) {
        case MetricKind::Faithfulness: return "faithfulness";
        case MetricKind::AnswerRelevance: return "answer_relevance";
        case MetricKind::RetrievalRecall: return "retrieval_recall";
        case MetricKind::RetrievalPrecision: return "retrieval_precision";
    }
    return "unknown";
}

std::string_view metric_title(MetricKind kind) noexcept {
    switch (kind) {
        case MetricKind::Faithfulness: return "Faithfulness";
        case MetricKind::AnswerRelevance: return "Relevance";
        case MetricKind::RetrievalRecall: return "Recall";
        case MetricKind::RetrievalPrecision: return "Precision";
    }
    return "Unknown";
}

std::optional<MetricKind> metric_from_name(std::string_view name) noexcept {
    for (const auto kind : kAllMetrics) {
        if (metric_name(kind) == name) {
            return kind;
        }
    }
    return std::nullopt;
}

std::string_view status_name(MetricStatus status) noexcept {
    switch (status) {
        case MetricStatus::Computed: return "computed";
        case MetricStatus::Degenerate: return "degenerate";
        case MetricStatus::Failed: return "failed";
        case MetricStatus::Skipped: return "skipped";
    }
    return "unknown";
}

const MetricResult& MetricVector::operator[](MetricKind kind) const noexcept {
    switch (kind) {
        case MetricKind::Faithfulness: return faithfulness;
        case MetricKind::AnswerRelevance: return answer_relevance;
        case MetricKind::RetrievalRecall: return retrieval_recall;
        case MetricKind::RetrievalPrecision: break;
    }
    return retrieval_precision;
}

MetricResult& MetricVector::operator[](MetricKind kind) noexcept {
    return const_cast<MetricResult&>(std::as_const(*this)[kind]);
}

std::optional<double> MetricVector::score(MetricKind kind) const noexcept {
    const auto& r = (*this)[kind];
    return r.ok() ? std::optional<double>(r.score) : std::nullopt;
}

bool MetricVector::complete() const noexcept {
    return std::all_of(kAllMetrics.begin(), kAllMetrics.end(), [&](MetricKind k) { return (*this)[k].ok(); });
}

bool MetricVector::all_failed() const noexcept {
    return std::all_of(kAllMetrics.begin(), kAllMetrics.end(),
                       [&](MetricKind k) { return (*this)[k].status == MetricStatus::Failed; });
}

void SimilarityConfig::validate() const {
    if (!(precision_match_threshold >= 0.0 && precision_match_threshold <= 1.0)) {
        throw ConfigError("precision_match_threshold must lie in [0, 1]");
    }
    if (n_generated_questions == 0) {
        throw ConfigError("n_generated_questions must be positive");
    }
}

// Scoring ---------------------------------------------------------------

double cosine(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        throw MetricError("cosine of vectors with dimensions " + std::to_string(u.size()) + " and " +
                          std::to_string(v.size()));
    }
    double dot = 0.0;
    double uu = 0.0;
    double vv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        uu += u[i] * u[i];
        vv += v[i] * v[i];
    }
    if (uu == 0.0 || vv == 0.0) {
        return 0.0;
    }
    // sqrt(uu * vv) rather than sqrt(uu) * sqrt(vv): identical vectors give exactly 1.
    return std::clamp(dot / std::sqrt(uu * vv), -1.0, 1.0);
}

double faithfulness_score(const judge::FaithfulnessVerdicts& v) {
    if (v.verdicts.empty()) {
        throw MetricError("faithfulness score of an empty verdict list");
    }
    const auto yes = std::count(v.verdicts.begin(), v.verdicts.end(), true);
    return static_cast<double>(yes) / static_cast<double>(v.verdicts.size());
}

double recall_score(const judge::RecallClassification& c) {
    if (c.supported.empty()) {
        throw MetricError("recall score of an empty classification");
    }
    const auto yes = std::count(c.supported.begin(), c.supported.end(), true);
    return static_cast<double>(yes) / static_cast<double>(c.supported.size());
}

PrecisionDetail precision_detail(const judge::PrecisionExtraction& x, std::span<const std::string> contexts,
                                 const Embedder& embedder, const SimilarityConfig& cfg) {
    PrecisionDetail out;
    for (const auto& context : contexts) {
        auto sentences = text::segment_sentences(context);
        out.context_sentences.insert(out.context_sentences.end(), std::make_move_iterator(sentences.begin()),
                                     std::make_move_iterator(sentences.end()));
    }
    if (out.context_sentences.empty()) {
        out.degenerate = true;
        return out;
    }
    out.best_similarity.assign(out.context_sentences.size(), 0.0);
    if (x.insufficient || x.candidate_sentences.empty()) {
        return out;
    }

    std::vector<std::vector<double>> candidate_vectors;
    std::size_t relevant = 0;
    for (std::size_t i = 0; i < out.context_sentences.size(); ++i) {
        const auto sentence = text::trim(out.context_sentences[i]);
        const bool verbatim = std::any_of(x.candidate_sentences.begin(), x.candidate_sentences.end(),
                                          [&](const std::string& c) { return text::trim(c) == sentence; });
        if (verbatim) {
            out.best_similarity[i] = 1.0;
            ++relevant;
            continue;
        }
        if (candidate_vectors.empty()) {
            for (const auto& c : x.candidate_sentences) {
                candidate_vectors.push_back(embedder.embed(c));
            }
        }
        const auto v = embedder.embed(sentence);
        double best = -1.0;
        for (const auto& c : candidate_vectors) {
            best = std::max(best, cosine(v, c));
        }
        out.best_similarity[i] = best;
        if (best >= cfg.precision_match_threshold) {
            ++relevant;
        }
    }
    out.score = static_cast<double>(relevant) / static_cast<double>(out.context_sentences.size());
    return out;
}

double precision_score(const judge::PrecisionExtraction& x, std::span<const std::string> contexts,
                       const Embedder& embedder, const SimilarityConfig& cfg) {
    return precision_detail(x, contexts, embedder, cfg).score;
}

namespace {

std::vector<double> relevance_similarities(std::string_view original_query, const judge::GeneratedQuestions& qs,
                                           const Embedder& embedder) {
    if (qs.questions.empty()) {
        throw MetricError("answer relevance needs at least one generated question");
    }
    const auto original = embedder.embed(original_query);
    std::vector<double> sims;
    sims.reserve(qs.questions.size());
    for (const auto& q : qs.questions) {
        sims.push_back(std::clamp(cosine(original, embedder.embed(q)), 0.0, 1.0));
    }
    return sims;
}

double mean_of_sorted(std::vector<double> values) {
    // Summing in sorted order makes the mean independent of question order.
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (const double v : values) {
        sum += v;
    }
    return sum / static_cast<double>(values.size());
}

}  // namespace

double answer_relevance_score(std::string_view original_query, const judge::GeneratedQuestions& qs,
                              const Embedder& embedder) {
    return mean_of_sorted(relevance_similarities(original_query, qs, embedder));
}

// Orchestration ---------------------------------------------------------

namespace {

void fail(MetricResult& r, std::string message) {
    r = MetricResult{};
    r.status = MetricStatus::Failed;
    r.error = std::move(message);
}

template <class Body>
void guarded(MetricResult& result, Body&& body) {
    try {
        body();
    } catch (const AuthError&) {
        throw;
    } catch (const ProviderError& e) {
        fail(result, e.what());
        result.provider_failure = true;
    } catch (const std::exception& e) {
        fail(result, e.what());
    }
}

std::vector<std::string> faithfulness_statements(const EvalRecord& record, StatementStrategy strategy) {
    if (strategy == StatementStrategy::WholeAnswer) {
        return {std::string(text::trim(record.answer))};
    }
    return text::segment_sentences(record.answer);
}

void run_faithfulness(const EvalRecord& record, const Providers& p, const EvalConfig& cfg, MetricResult& r) {
    guarded(r, [&] {
        auto statements = faithfulness_statements(record, cfg.statements);
        const auto prompt = judge::build_faithfulness_prompt(record, statements);
        const auto transcript = p.generator->complete(prompt.text, cfg.generation);
        auto verdicts = judge::parse_faithfulness_verdicts(transcript, statements.size());
        verdicts.statements = std::move(statements);

        r.status = MetricStatus::Computed;
        r.score = faithfulness_score(verdicts);
        r.transcripts = {transcript};
        r.items = verdicts.statements;
        for (const bool v : verdicts.verdicts) {
            r.values.push_back(v ? 1.0 : 0.0);
        }
        r.notes = prompt.warnings;
    });
}

void run_recall(const EvalRecord& record, const Providers& p, const EvalConfig& cfg, MetricResult& r) {
    guarded(r, [&] {
        const bool has_truth = record.ground_truth && !text::trim(*record.ground_truth).empty();
        std::string_view source = record.answer;
        std::string origin = "answer";
        if (cfg.recall_source == RecallSource::GroundTruth ||
            (cfg.recall_source == RecallSource::Auto && has_truth)) {
            if (!has_truth) {
                throw MetricError("recall source is ground_truth but record has none");
            }
            source = *record.ground_truth;
            origin = "ground_truth";
        }
        if (record.contexts.empty()) {
            r.status = MetricStatus::Degenerate;
            r.score = 0.0;
            r.notes = {"no contexts: recall defined as 0"};
            return;
        }
        auto sentences = text::segment_sentences(source);
        if (sentences.empty()) {
            throw MetricError("recall source text has no sentences");
        }
        const auto prompt = judge::build_recall_prompt(record, source);
        const auto transcript = p.generator->complete(prompt.text, cfg.generation);
        auto classification = judge::parse_recall_classification(
            judge::with_marker(judge::kClassificationMarker, transcript), sentences.size());
        classification.sentences = std::move(sentences);

        r.status = MetricStatus::Computed;
        r.score = recall_score(classification);
        r.transcripts = {transcript};
        r.items = classification.sentences;
        for (const bool v : classification.supported) {
            r.values.push_back(v ? 1.0 : 0.0);
        }
        r.notes = {"sentences from " + origin};
    });
}

void run_precision(const EvalRecord& record, const Providers& p, const EvalConfig& cfg, MetricResult& r) {
    guarded(r, [&] {
        if (record.contexts.empty()) {
            r.status = MetricStatus::Degenerate;
            r.score = 0.0;
            r.notes = {"no contexts: precision defined as 0"};
            return;
        }
        const auto prompt = judge::build_precision_prompt(record);
        const auto transcript = p.generator->complete(prompt.text, cfg.generation);
        const auto extraction =
            judge::parse_precision_extraction(judge::with_marker(judge::kCandidateMarker, transcript));
        const auto detail = precision_detail(extraction, record.contexts, *p.embedder, cfg.similarity);

        r.status = detail.degenerate ? MetricStatus::Degenerate : MetricStatus::Computed;
        r.score = detail.score;
        r.transcripts = {transcript};
        r.items = detail.context_sentences;
        r.values = detail.best_similarity;
        if (extraction.insufficient) {
            r.notes.push_back("judge returned Insufficient Information");
        }
        if (detail.degenerate) {
            r.notes.push_back("contexts contain no sentences: precision defined as 0");
        }
    });
}

void run_relevance(const EvalRecord& record, const Providers& p, const EvalConfig& cfg, MetricResult& r) {
    guarded(r, [&] {
        const auto prompt = judge::build_question_gen_prompt(record.answer);
        judge::GeneratedQuestions qs;
        const std::int64_t base_seed = cfg.generation.seed.value_or(0);
        for (std::size_t i = 0; i < cfg.similarity.n_generated_questions; ++i) {
            auto params = cfg.generation;
            params.seed = base_seed + static_cast<std::int64_t>(i);
            auto transcript = p.generator->complete(prompt.text, params);
            qs.questions.push_back(
                judge::parse_generated_question(judge::with_marker(judge::kQuestionMarker, transcript)));
            qs.raw_transcripts.push_back(std::move(transcript));
        }
        auto sims = relevance_similarities(record.query, qs, *p.embedder);

        r.status = MetricStatus::Computed;
        r.score = mean_of_sorted(sims);
        r.transcripts = std::move(qs.raw_transcripts);
        r.items = std::move(qs.questions);
        r.values = std::move(sims);
    });
}

}  // namespace

RecordEvaluation evaluate_record(const EvalRecord& record, const Providers& providers, const EvalConfig& cfg) {
    if (!providers.generator || !providers.embedder) {
        throw ConfigError("evaluation needs a text generator and an embedder");
    }
    RecordEvaluation out;
    out.id = record.id;
    if (text::trim(record.answer).empty() || text::trim(record.query).empty()) {
        for (const auto kind : kAllMetrics) {
            fail(out.metrics[kind], "record '" + record.id + "' has an empty query or answer");
        }
        return out;
    }
    run_faithfulness(record, providers, cfg, out.metrics.faithfulness);
    run_relevance(record, providers, cfg, out.metrics.answer_relevance);
    run_recall(record, providers, cfg, out.metrics.retrieval_recall);
    run_precision(record, providers, cfg, out.metrics.retrieval_precision);
    for (const auto kind : kAllMetrics) {
        for (const auto& note : out.metrics[kind].notes) {
            if (note.find("no contexts") != std::string::npos) {
                out.warnings.push_back(std::string(metric_name(kind)) + ": " + note);
            }
        }
    }
    return out;
}

std::optional<double> SetEvaluation::mean(MetricKind kind) const noexcept {
    return means[static_cast<std::size_t>(kind)];
}

std::size_t SetEvaluation::failure_count(MetricKind kind) const noexcept {
    return failures[static_cast<std::size_t>(kind)];
}

std::vector<double> SetEvaluation::values(MetricKind kind) const {
    std::vector<double> out;
    for (const auto& r : records) {
        if (const auto s = r.metrics.score(kind)) {
            out.push_back(*s);
        }
    }
    return out;
}

SetEvaluation evaluate_set(const RecordSet& set, const Providers& providers, const EvalConfig& cfg) {
    if (set.empty()) {
        throw SetError("record set '" + set.label() + "' is empty");
    }
    cfg.similarity.validate();
    cfg.generation.validate();

    SetEvaluation out;
    out.label = set.label();
    out.records.resize(set.size());
    const auto records = set.records();
    detail::parallel_for(records.size(), cfg.parallelism,
                         [&](std::size_t i) { out.records[i] = evaluate_record(records[i], providers, cfg); });

    for (const auto kind : kAllMetrics) {
        const auto k = static_cast<std::size_t>(kind);
        const auto vals = out.values(kind);
        out.failures[k] = static_cast<std::size_t>(std::count_if(
            out.records.begin(), out.records.end(),
            [&](const RecordEvaluation& r) { return r.metrics[kind].status == MetricStatus::Failed; }));
        if (!vals.empty()) {
            double sum = 0.0;
            for (const double v : vals) {
                sum += v;
            }
            out.means[k] = sum / static_cast<double>(vals.size());
        }
    }
    out.failed_records = static_cast<std::size_t>(std::count_if(
        out.records.begin(), out.records.end(), [](const RecordEvaluation& r) { return r.metrics.all_failed(); }));
    if (out.failed_records == out.records.size()) {
        std::string first_error;
        bool provider_failure = false;
        for (const auto kind : kAllMetrics) {
            const auto& m = out.records.front().metrics[kind];
            provider_failure = provider_failure || m.provider_failure;
            if (first_error.empty()) {
                first_error = m.error;
            }
        }
        throw SetError("every record in set '" + set.label() + "' failed (first error: " + first_error + ")",
                       provider_failure);
    }
    return out;
}

}  // namespace rageval
