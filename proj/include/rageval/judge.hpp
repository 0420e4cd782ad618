#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rageval/corpus.hpp"

namespace rageval::judge {

// Section markers the prompts end with and the parsers anchor on.
inline constexpr std::string_view kVerdictMarker = "Final verdict for each statement in order:";
inline constexpr std::string_view kFaithfulnessAnswerMarker = "Answer:";
inline constexpr std::string_view kClassificationMarker = "Classification:";
inline constexpr std::string_view kCandidateMarker = "Candidate Sentences:";
inline constexpr std::string_view kQuestionMarker = "Question:";
inline constexpr std::string_view kSupportedTag = "[Supported by Context]";
inline constexpr std::string_view kNotSupportedTag = "[Not Supported by Context]";
inline constexpr std::string_view kInsufficientSentinel = "Insufficient Information";

struct FaithfulnessVerdicts {
    std::vector<std::string> statements;
    std::vector<bool> verdicts;  // Yes -> true
    std::string raw_transcript;
};

struct RecallClassification {
    std::vector<std::string> sentences;
    std::vector<bool> supported;
    std::string raw_transcript;
};

struct PrecisionExtraction {
    std::vector<std::string> candidate_sentences;
    bool insufficient = false;
    std::string raw_transcript;
};

struct GeneratedQuestions {
    std::vector<std::string> questions;
    std::vector<std::string> raw_transcripts;
};

/// A rendered prompt plus non-fatal observations about it.
struct Prompt {
    std::string text;
    std::vector<std::string> warnings;
};

/// Contexts joined with blank lines, in retrieval order.
std::string join_contexts(std::span<const std::string> contexts);

// Faithfulness --------------------------------------------------------------

/// Throws Error when `statements` is empty. Empty contexts render an empty
/// Context section and add a warning.
Prompt build_faithfulness_prompt(const EvalRecord& record, std::span<const std::string> statements);

/// Reads the last "Final verdict for each statement in order:" line. Tokens
/// are yes/no in any case with trailing '.' or ',' tolerated.
FaithfulnessVerdicts parse_faithfulness_verdicts(std::string_view transcript, std::size_t n_statements);

// Retrieval recall ----------------------------------------------------------

/// Renders the recall prompt; `source_text` fills the {ground_truth} slot.
Prompt build_recall_prompt(const EvalRecord& record, std::string_view source_text);

/// Items are the numbered or bulleted lines after the last
/// "Classification:" marker (the whole transcript when the marker is
/// absent); the last bracket tag of each item decides.
RecallClassification parse_recall_classification(std::string_view transcript, std::size_t n_sentences);

// Retrieval precision -------------------------------------------------------

Prompt build_precision_prompt(const EvalRecord& record);

/// Reads the section after the last "Candidate Sentences:" marker. A lone
/// "Insufficient Information" marks the extraction insufficient; otherwise
/// each non-empty line, stripped of a bullet, is a candidate sentence.
PrecisionExtraction parse_precision_extraction(std::string_view transcript);

// Answer relevance ----------------------------------------------------------

Prompt build_question_gen_prompt(std::string_view answer);

/// First non-empty line after the last "Question:" marker.
std::string parse_generated_question(std::string_view transcript);

/// Prepends `marker` when a continuation-style completion omits it.
std::string with_marker(std::string_view marker, std::string_view completion);

}  // namespace rageval::judge
