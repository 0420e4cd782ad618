#include "rageval/judge.hpp"

#include <cctype>

#include "rageval/error.hpp"
#include "rageval/templates.hpp"
#include "rageval/text.hpp"

namespace rageval::judge {

namespace {

using text::trim;

std::string_view after(std::string_view s, std::size_t pos, std::size_t skip) {
    return s.substr(pos + skip);
}

// Length of a list-item prefix ("3. ", "3) ", "- ", "* ", "• "), 0 if none.
std::size_t item_prefix_length(std::string_view line) {
    std::size_t i = 0;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i])) != 0) {
        ++i;
    }
    if (i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')')) {
        ++i;
        if (i == line.size() || line[i] == ' ' || line[i] == '\t') {
            return i;
        }
        return 0;
    }
    if (i > 0) {
        return 0;
    }
    for (std::string_view bullet : {"- ", "* ", "\xE2\x80\xA2 "}) {
        if (line.starts_with(bullet)) {
            return bullet.size();
        }
    }
    return 0;
}

std::string normalize_tag(std::string_view tag) {
    std::string out;
    for (const auto word : text::split_whitespace(tag)) {
        if (!out.empty()) {
            out.push_back(' ');
        }
        out += text::to_lower(word);
    }
    return out;
}

}  // namespace

std::string join_contexts(std::span<const std::string> contexts) {
    std::string out;
    for (std::size_t i = 0; i < contexts.size(); ++i) {
        if (i > 0) {
            out += "\n\n";
        }
        out += contexts[i];
    }
    return out;
}

std::string with_marker(std::string_view marker, std::string_view completion) {
    if (text::find_ci(completion, marker) != std::string_view::npos) {
        return std::string(completion);
    }
    std::string out(marker);
    out.push_back('\n');
    out += completion;
    return out;
}

// Faithfulness --------------------------------------------------------------

Prompt build_faithfulness_prompt(const EvalRecord& record, std::span<const std::string> statements) {
    if (statements.empty()) {
        throw Error("faithfulness prompt for record '" + record.id + "' needs at least one statement");
    }
    Prompt prompt;
    if (record.contexts.empty()) {
        prompt.warnings.push_back("record '" + record.id + "' has no contexts; Context section is empty");
    }
    prompt.text = text::render(templates::get(templates::kFaithfulness),
                               {{"context", join_contexts(record.contexts)},
                                {"statements", text::numbered_list(statements)}});
    return prompt;
}

FaithfulnessVerdicts parse_faithfulness_verdicts(std::string_view transcript, std::size_t n_statements) {
    if (n_statements == 0) {
        throw Error("faithfulness verdicts requested for zero statements");
    }
    const auto pos = text::rfind_ci(transcript, kVerdictMarker);
    if (pos == std::string_view::npos) {
        throw ParseError(ParseError::Kind::MissingSection, "faithfulness transcript has no '" +
                                                               std::string(kVerdictMarker) + "' line");
    }
    auto line = after(transcript, pos, kVerdictMarker.size());
    line = line.substr(0, line.find('\n'));

    FaithfulnessVerdicts out;
    out.raw_transcript = std::string(transcript);
    for (auto token : text::split_whitespace(line)) {
        const auto original = token;
        while (!token.empty() && (token.back() == '.' || token.back() == ',')) {
            token.remove_suffix(1);
        }
        if (text::iequals(token, "yes")) {
            out.verdicts.push_back(true);
        } else if (text::iequals(token, "no")) {
            out.verdicts.push_back(false);
        } else {
            throw ParseError(ParseError::Kind::Token,
                             "unexpected faithfulness verdict token '" + std::string(original) + "'");
        }
    }
    if (out.verdicts.size() != n_statements) {
        throw CountMismatchError(n_statements, out.verdicts.size(),
                                 "faithfulness verdict count " + std::to_string(out.verdicts.size()) +
                                     " does not match statement count " + std::to_string(n_statements));
    }
    return out;
}

// Retrieval recall ----------------------------------------------------------

Prompt build_recall_prompt(const EvalRecord& record, std::string_view source_text) {
    Prompt prompt;
    if (record.contexts.empty()) {
        prompt.warnings.push_back("record '" + record.id + "' has no contexts; Context section is empty");
    }
    prompt.text = text::render(templates::get(templates::kRecall),
                               {{"context", join_contexts(record.contexts)},
                                {"ground_truth", std::string(source_text)}});
    return prompt;
}

RecallClassification parse_recall_classification(std::string_view transcript, std::size_t n_sentences) {
    if (n_sentences == 0) {
        throw Error("recall classification requested for zero sentences");
    }
    auto section = transcript;
    if (const auto pos = text::rfind_ci(transcript, kClassificationMarker); pos != std::string_view::npos) {
        section = after(transcript, pos, kClassificationMarker.size());
    }

    std::vector<std::string> items;
    bool in_item = false;
    for (const auto raw : text::split_lines(section)) {
        const auto line = trim(raw);
        if (line.empty()) {
            in_item = false;
            continue;
        }
        if (const auto skip = item_prefix_length(line); skip > 0) {
            items.emplace_back(trim(line.substr(skip)));
            in_item = true;
        } else if (in_item) {
            items.back().push_back(' ');
            items.back().append(line);
        }
    }
    if (items.empty()) {
        throw ParseError(ParseError::Kind::MissingSection, "recall transcript has no classification items");
    }

    const auto supported = normalize_tag(kSupportedTag);
    const auto not_supported = normalize_tag(kNotSupportedTag);

    RecallClassification out;
    out.raw_transcript = std::string(transcript);
    for (std::size_t i = 0; i < items.size(); ++i) {
        const std::string_view item = items[i];
        const auto close = item.rfind(']');
        const auto open = close == std::string_view::npos ? close : item.rfind('[', close);
        if (open == std::string_view::npos) {
            throw ParseError(ParseError::Kind::MissingTag,
                             "recall item " + std::to_string(i + 1) + " has no classification tag");
        }
        const auto tag = normalize_tag(item.substr(open, close - open + 1));
        if (tag == supported) {
            out.supported.push_back(true);
        } else if (tag == not_supported) {
            out.supported.push_back(false);
        } else {
            throw ParseError(ParseError::Kind::UnknownTag, "recall item " + std::to_string(i + 1) +
                                                               " has unknown tag '" +
                                                               std::string(item.substr(open, close - open + 1)) + "'");
        }
    }
    if (out.supported.size() != n_sentences) {
        throw CountMismatchError(n_sentences, out.supported.size(),
                                 "recall classification count " + std::to_string(out.supported.size()) +
                                     " does not match sentence count " + std::to_string(n_sentences));
    }
    return out;
}

// Retrieval precision -------------------------------------------------------

Prompt build_precision_prompt(const EvalRecord& record) {
    Prompt prompt;
    if (record.contexts.empty()) {
        prompt.warnings.push_back("record '" + record.id + "' has no contexts; Context section is empty");
    }
    prompt.text = text::render(templates::get(templates::kPrecision),
                               {{"question", record.query}, {"context", join_contexts(record.contexts)}});
    return prompt;
}

PrecisionExtraction parse_precision_extraction(std::string_view transcript) {
    const auto pos = text::rfind_ci(transcript, kCandidateMarker);
    if (pos == std::string_view::npos) {
        throw ParseError(ParseError::Kind::MissingSection, "precision transcript has no '" +
                                                               std::string(kCandidateMarker) + "' section");
    }
    std::vector<std::string> lines;
    for (const auto raw : text::split_lines(after(transcript, pos, kCandidateMarker.size()))) {
        auto line = trim(raw);
        if (line.empty()) {
            continue;
        }
        line = trim(line.substr(item_prefix_length(line)));
        if (!line.empty()) {
            lines.emplace_back(line);
        }
    }
    if (lines.empty()) {
        throw ParseError(ParseError::Kind::Empty,
                         "precision transcript has an empty candidate section (no sentences and no sentinel)");
    }

    PrecisionExtraction out;
    out.raw_transcript = std::string(transcript);
    if (lines.size() == 1) {
        std::string_view only = lines.front();
        while (!only.empty() && (only.back() == '.' || only.back() == '"')) {
            only.remove_suffix(1);
        }
        while (!only.empty() && only.front() == '"') {
            only.remove_prefix(1);
        }
        if (text::iequals(trim(only), kInsufficientSentinel)) {
            out.insufficient = true;
            return out;
        }
    }
    out.candidate_sentences = std::move(lines);
    return out;
}

// Answer relevance ----------------------------------------------------------

Prompt build_question_gen_prompt(std::string_view answer) {
    Prompt prompt;
    prompt.text =
        text::render(templates::get(templates::kQuestionGeneration), {{"answer", std::string(answer)}});
    return prompt;
}

std::string parse_generated_question(std::string_view transcript) {
    const auto pos = text::rfind_ci(transcript, kQuestionMarker);
    if (pos == std::string_view::npos) {
        throw ParseError(ParseError::Kind::MissingSection, "question transcript has no 'Question:' marker");
    }
    for (const auto raw : text::split_lines(after(transcript, pos, kQuestionMarker.size()))) {
        if (const auto line = trim(raw); !line.empty()) {
            return std::string(line);
        }
    }
    throw ParseError(ParseError::Kind::Empty, "question transcript has an empty 'Question:' section");
}

}  // namespace rageval::judge
