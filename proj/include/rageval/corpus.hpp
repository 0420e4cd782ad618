#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rageval/providers.hpp"

namespace rageval {

/// One (query, answer, contexts) unit under evaluation.
struct EvalRecord {
    std::string id;
    std::string query;
    std::string answer;
    std::vector<std::string> contexts;  // retrieved passages, in retrieval order
    std::optional<std::string> ground_truth;

    bool operator==(const EvalRecord&) const = default;
};

/// Labelled, immutable collection of records with distinct ids.
class RecordSet {
public:
    /// Throws RecordSetError on an empty label or duplicate ids.
    RecordSet(std::string label, std::vector<EvalRecord> records);

    const std::string& label() const noexcept { return label_; }
    std::span<const EvalRecord> records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }

private:
    std::string label_;
    std::vector<EvalRecord> records_;
};

// ---------------------------------------------------------------------------
// Qrels
// ---------------------------------------------------------------------------

struct QrelsEntry {
    std::string topic_id;
    std::string doc_id;
    int relevance = 0;

    bool operator==(const QrelsEntry&) const = default;
};

/// Parses "topic iteration doc grade" lines. The iteration column is dropped
/// and blank lines are skipped. Throws QrelsError with the 1-based line number.
std::vector<QrelsEntry> parse_qrels(std::istream& in);
std::vector<QrelsEntry> parse_qrels_text(std::string_view text);

/// Writes entries back in qrels layout with iteration "0".
std::string serialize_qrels(std::span<const QrelsEntry> entries);

std::vector<QrelsEntry> filter_by_grade(std::span<const QrelsEntry> entries, int grade);

/// Seeded uniform sample of `count` entries without replacement, returned in
/// their original file order. Throws Error when count exceeds the input size.
std::vector<QrelsEntry> sample_entries(std::span<const QrelsEntry> entries, std::size_t count,
                                       std::uint64_t seed);

// ---------------------------------------------------------------------------
// Record files
// ---------------------------------------------------------------------------

enum class RecordFormat {
    JsonLines,  // one {id, query, answer, contexts[], ground_truth?} object per line
    Delimited,  // tab-separated with header: id, query, answer[, ground_truth], context columns...
};

struct RecordIssue {
    std::size_t row = 0;  // 1-based data row
    std::string record_id;  // empty when the id itself could not be read
    std::string message;
};

struct RecordLoad {
    RecordSet set;
    std::vector<RecordIssue> issues;  // rows that did not become records
    std::size_t rows = 0;             // == set.size() + issues.size()
};

/// Row-level problems (missing query/answer, bad JSON) are collected in
/// `issues`; duplicate ids throw RecordSetError.
RecordLoad load_record_set(std::istream& in, RecordFormat format, std::string label);
RecordLoad load_record_set(const std::filesystem::path& path, RecordFormat format,
                           std::optional<std::string> label = std::nullopt);

std::string record_to_json_line(const EvalRecord& record);
std::string write_record_set(const RecordSet& set);

// ---------------------------------------------------------------------------
// Synthetic generation
// ---------------------------------------------------------------------------

/// Request for `count` synthetic passage/question pairs about one topic.
class SyntheticSpec {
public:
    /// Throws ConfigError when count is 0, the label is empty, or the prompt
    /// does not ask for "Passage:" and "Question:" sections.
    SyntheticSpec(std::string topic_label, std::string prompt_template, std::size_t count);

    const std::string& topic_label() const noexcept { return topic_label_; }
    const std::string& prompt_template() const noexcept { return prompt_template_; }
    std::size_t count() const noexcept { return count_; }

private:
    std::string topic_label_;
    std::string prompt_template_;
    std::size_t count_;
};

struct PassageQuestion {
    std::string passage;
    std::string question;
};

/// Splits a generation transcript at its first "Passage:" and "Question:"
/// headers (case-insensitive). Throws ParseError when either is missing or
/// empty.
PassageQuestion parse_passage_question(std::string_view transcript);

struct SyntheticDiagnostic {
    std::size_t index = 0;  // 0-based generation call
    std::string message;
};

struct SyntheticResult {
    RecordSet set;
    std::vector<std::string> transcripts;  // every raw transcript, in call order
    std::vector<SyntheticDiagnostic> skipped;
};

/// Calls the generator `count` times (call i uses seed base_seed + i) with at
/// most `parallelism` calls in flight. Records get ids "<label>-0001"...,
/// empty answers and the passage as their only context. Unparseable
/// transcripts are skipped and reported; a generator failure throws
/// SynthesisError carrying the number of completed calls.
SyntheticResult generate_synthetic(const SyntheticSpec& spec, const TextGenerator& generator,
                                   const GenerationParams& params = {}, std::size_t parallelism = 1);

}  // namespace rageval
