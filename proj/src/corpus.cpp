#include "rageval/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "parallel.hpp"
#include "rageval/error.hpp"
#include "rageval/random.hpp"
#include "rageval/text.hpp"

namespace rageval {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

RecordSet::RecordSet(std::string label, std::vector<EvalRecord> records)
    : label_(std::move(label)), records_(std::move(records)) {
    if (text::trim(label_).empty()) {
        throw RecordSetError("record set label must not be empty");
    }
    std::unordered_set<std::string_view> seen;
    for (const auto& r : records_) {
        if (r.id.empty()) {
            throw RecordSetError("record set '" + label_ + "' contains a record without an id");
        }
        if (!seen.insert(r.id).second) {
            throw RecordSetError("record set '" + label_ + "' contains duplicate id '" + r.id + "'");
        }
    }
}

// ---------------------------------------------------------------------------
// Qrels
// ---------------------------------------------------------------------------

std::vector<QrelsEntry> parse_qrels(std::istream& in) {
    std::vector<QrelsEntry> out;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        const auto fields = text::split_whitespace(line);
        if (fields.empty()) {
            continue;
        }
        if (fields.size() < 4) {
            throw QrelsError(line_number, line,
                             "qrels line " + std::to_string(line_number) + ": expected 4 fields, got " +
                                 std::to_string(fields.size()) + ": '" + line + "'");
        }
        const auto grade = text::parse_int(fields[3]);
        if (!grade || *grade < 0 || *grade > std::numeric_limits<int>::max()) {
            throw QrelsError(line_number, line,
                             "qrels line " + std::to_string(line_number) + ": grade '" + std::string(fields[3]) +
                                 "' is not a non-negative integer: '" + line + "'");
        }
        out.push_back({std::string(fields[0]), std::string(fields[2]), static_cast<int>(*grade)});
    }
    return out;
}

std::vector<QrelsEntry> parse_qrels_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_qrels(in);
}

std::string serialize_qrels(std::span<const QrelsEntry> entries) {
    std::string out;
    for (const auto& e : entries) {
        out += e.topic_id;
        out += " 0 ";
        out += e.doc_id;
        out += ' ';
        out += std::to_string(e.relevance);
        out += '\n';
    }
    return out;
}

std::vector<QrelsEntry> filter_by_grade(std::span<const QrelsEntry> entries, int grade) {
    std::vector<QrelsEntry> out;
    std::copy_if(entries.begin(), entries.end(), std::back_inserter(out),
                 [grade](const QrelsEntry& e) { return e.relevance == grade; });
    return out;
}

std::vector<QrelsEntry> sample_entries(std::span<const QrelsEntry> entries, std::size_t count, std::uint64_t seed) {
    if (count > entries.size()) {
        throw Error("cannot sample " + std::to_string(count) + " of " + std::to_string(entries.size()) +
                    " qrels entries without replacement");
    }
    std::vector<std::size_t> idx(entries.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    random::Engine rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
        const auto j = i + random::uniform_index(rng, idx.size() - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
    std::vector<QrelsEntry> out;
    out.reserve(count);
    for (const auto i : idx) {
        out.push_back(entries[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Record files
// ---------------------------------------------------------------------------

namespace {

struct Row {
    std::optional<EvalRecord> record;
    RecordIssue issue;
};

Row json_row(std::string_view line, std::size_t row) {
    Row out;
    out.issue.row = row;
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        out.issue.message = std::string("invalid JSON: ") + e.what();
        return out;
    }
    if (!j.is_object()) {
        out.issue.message = "row is not a JSON object";
        return out;
    }
    EvalRecord r;
    if (const auto it = j.find("id"); it != j.end() && it->is_string()) {
        r.id = it->get<std::string>();
    } else if (it != j.end() && it->is_number_integer()) {
        r.id = std::to_string(it->get<long long>());
    }
    out.issue.record_id = r.id;
    if (r.id.empty()) {
        out.issue.message = "missing id";
        return out;
    }
    for (const char* field : {"query", "answer"}) {
        const auto it = j.find(field);
        if (it == j.end() || !it->is_string()) {
            out.issue.message = "record '" + r.id + "' is missing required field '" + field + "'";
            return out;
        }
    }
    r.query = j["query"].get<std::string>();
    r.answer = j["answer"].get<std::string>();
    if (text::trim(r.query).empty()) {
        out.issue.message = "record '" + r.id + "' has an empty query";
        return out;
    }
    if (const auto it = j.find("contexts"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) {
            out.issue.message = "record '" + r.id + "': contexts must be an array of strings";
            return out;
        }
        for (const auto& c : *it) {
            if (!c.is_string()) {
                out.issue.message = "record '" + r.id + "': contexts must be an array of strings";
                return out;
            }
            r.contexts.push_back(c.get<std::string>());
        }
    }
    if (const auto it = j.find("ground_truth"); it != j.end() && !it->is_null()) {
        if (!it->is_string()) {
            out.issue.message = "record '" + r.id + "': ground_truth must be a string";
            return out;
        }
        r.ground_truth = it->get<std::string>();
    }
    out.record = std::move(r);
    return out;
}

std::string unescape_cell(std::string_view cell) {
    std::string out;
    out.reserve(cell.size());
    for (std::size_t i = 0; i < cell.size(); ++i) {
        if (cell[i] == '\\' && i + 1 < cell.size()) {
            const char n = cell[++i];
            switch (n) {
                case 't': out.push_back('\t'); break;
                case 'n': out.push_back('\n'); break;
                case 'r': out.push_back('\r'); break;
                case '\\': out.push_back('\\'); break;
                default:
                    out.push_back('\\');
                    out.push_back(n);
            }
        } else {
            out.push_back(cell[i]);
        }
    }
    return out;
}

std::vector<std::string> split_tabs(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
        const auto tab = line.find('\t', start);
        cells.push_back(unescape_cell(line.substr(start, tab == std::string_view::npos ? tab : tab - start)));
        if (tab == std::string_view::npos) {
            return cells;
        }
        start = tab + 1;
    }
}

struct TsvLayout {
    std::size_t id = 0, query = 0, answer = 0;
    std::optional<std::size_t> ground_truth;
    std::vector<std::size_t> contexts;
};

TsvLayout tsv_layout(const std::vector<std::string>& header) {
    TsvLayout layout;
    bool has_id = false, has_query = false, has_answer = false;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const auto name = text::to_lower(text::trim(header[i]));
        if (name == "id") {
            layout.id = i;
            has_id = true;
        } else if (name == "query") {
            layout.query = i;
            has_query = true;
        } else if (name == "answer") {
            layout.answer = i;
            has_answer = true;
        } else if (name == "ground_truth") {
            layout.ground_truth = i;
        } else if (name.starts_with("context")) {
            layout.contexts.push_back(i);
        }
    }
    if (!has_id || !has_query || !has_answer) {
        throw ConfigError("delimited record file header must name id, query and answer columns");
    }
    return layout;
}

Row tsv_row(const TsvLayout& layout, std::string_view line, std::size_t row) {
    const auto cells = split_tabs(line);
    auto cell = [&](std::size_t i) -> const std::string* { return i < cells.size() ? &cells[i] : nullptr; };

    Row out;
    out.issue.row = row;
    const auto* id = cell(layout.id);
    if (id == nullptr || text::trim(*id).empty()) {
        out.issue.message = "missing id";
        return out;
    }
    out.issue.record_id = *id;
    const auto* query = cell(layout.query);
    const auto* answer = cell(layout.answer);
    if (query == nullptr || text::trim(*query).empty()) {
        out.issue.message = "record '" + *id + "' is missing required field 'query'";
        return out;
    }
    if (answer == nullptr || text::trim(*answer).empty()) {
        out.issue.message = "record '" + *id + "' is missing required field 'answer'";
        return out;
    }
    EvalRecord r{*id, *query, *answer, {}, std::nullopt};
    if (layout.ground_truth) {
        if (const auto* gt = cell(*layout.ground_truth); gt != nullptr && !gt->empty()) {
            r.ground_truth = *gt;
        }
    }
    for (const auto c : layout.contexts) {
        if (const auto* ctx = cell(c); ctx != nullptr && !ctx->empty()) {
            r.contexts.push_back(*ctx);
        }
    }
    out.record = std::move(r);
    return out;
}

}  // namespace

RecordLoad load_record_set(std::istream& in, RecordFormat format, std::string label) {
    std::vector<EvalRecord> records;
    std::vector<RecordIssue> issues;
    std::size_t rows = 0;
    std::optional<TsvLayout> layout;

    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (text::trim(line).empty()) {
            continue;
        }
        if (format == RecordFormat::Delimited && !layout) {
            layout = tsv_layout(split_tabs(line));
            continue;
        }
        ++rows;
        auto row = format == RecordFormat::JsonLines ? json_row(line, rows) : tsv_row(*layout, line, rows);
        if (row.record) {
            records.push_back(std::move(*row.record));
        } else {
            issues.push_back(std::move(row.issue));
        }
    }
    return RecordLoad{RecordSet(std::move(label), std::move(records)), std::move(issues), rows};
}

RecordLoad load_record_set(const std::filesystem::path& path, RecordFormat format,
                           std::optional<std::string> label) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open record file '" + path.string() + "'");
    }
    return load_record_set(in, format, label.value_or(path.stem().string()));
}

std::string record_to_json_line(const EvalRecord& record) {
    ordered_json j;
    j["id"] = record.id;
    j["query"] = record.query;
    j["answer"] = record.answer;
    j["contexts"] = record.contexts;
    if (record.ground_truth) {
        j["ground_truth"] = *record.ground_truth;
    }
    return j.dump();
}

std::string write_record_set(const RecordSet& set) {
    std::string out;
    for (const auto& r : set.records()) {
        out += record_to_json_line(r);
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Synthetic generation
// ---------------------------------------------------------------------------

SyntheticSpec::SyntheticSpec(std::string topic_label, std::string prompt_template, std::size_t count)
    : topic_label_(std::move(topic_label)), prompt_template_(std::move(prompt_template)), count_(count) {
    if (count_ == 0) {
        throw ConfigError("synthetic count must be at least 1");
    }
    if (text::trim(topic_label_).empty()) {
        throw ConfigError("synthetic topic label must not be empty");
    }
    if (text::find_ci(prompt_template_, "Passage:") == std::string::npos ||
        text::find_ci(prompt_template_, "Question:") == std::string::npos) {
        throw ConfigError("synthetic prompt template must lay out 'Passage:' and 'Question:' sections");
    }
}

PassageQuestion parse_passage_question(std::string_view transcript) {
    constexpr std::string_view kPassage = "Passage:";
    constexpr std::string_view kQuestion = "Question:";
    const auto p = text::find_ci(transcript, kPassage);
    const auto q = text::find_ci(transcript, kQuestion);
    if (p == std::string_view::npos) {
        throw ParseError(ParseError::Kind::MissingSection, "synthetic transcript has no 'Passage:' section");
    }
    if (q == std::string_view::npos) {
        throw ParseError(ParseError::Kind::MissingSection, "synthetic transcript has no 'Question:' section");
    }
    const auto passage_end = q > p ? q : std::string_view::npos;
    const auto question_end = p > q ? p : std::string_view::npos;
    auto section = [&](std::size_t start, std::size_t end) {
        return transcript.substr(start, end == std::string_view::npos ? end : end - start);
    };

    PassageQuestion out;
    out.passage = std::string(text::trim(section(p + kPassage.size(), passage_end)));
    for (const auto line : text::split_lines(section(q + kQuestion.size(), question_end))) {
        if (const auto t = text::trim(line); !t.empty()) {
            out.question = std::string(t);
            break;
        }
    }
    if (out.passage.empty()) {
        throw ParseError(ParseError::Kind::Empty, "synthetic transcript has an empty 'Passage:' section");
    }
    if (out.question.empty()) {
        throw ParseError(ParseError::Kind::Empty, "synthetic transcript has an empty 'Question:' section");
    }
    return out;
}

SyntheticResult generate_synthetic(const SyntheticSpec& spec, const TextGenerator& generator,
                                   const GenerationParams& params, std::size_t parallelism) {
    params.validate();
    const std::size_t n = spec.count();
    std::vector<std::string> transcripts(n);
    std::atomic<std::size_t> completed{0};
    const std::int64_t base_seed = params.seed.value_or(0);

    try {
        detail::parallel_for(n, parallelism, [&](std::size_t i) {
            auto call = params;
            call.seed = base_seed + static_cast<std::int64_t>(i);
            transcripts[i] = generator.complete(spec.prompt_template(), call);
            completed.fetch_add(1);
        });
    } catch (const ProviderError& e) {
        throw SynthesisError(completed.load(), "synthetic generation for '" + spec.topic_label() + "' stopped after " +
                                                   std::to_string(completed.load()) + " of " + std::to_string(n) +
                                                   " calls: " + e.what());
    }

    std::vector<EvalRecord> records;
    std::vector<SyntheticDiagnostic> skipped;
    for (std::size_t i = 0; i < n; ++i) {
        try {
            auto pq = parse_passage_question(transcripts[i]);
            char id[32];
            std::snprintf(id, sizeof id, "-%04zu", i + 1);
            records.push_back(EvalRecord{spec.topic_label() + id, std::move(pq.question), "",
                                         {std::move(pq.passage)}, std::nullopt});
        } catch (const ParseError& e) {
            skipped.push_back({i, e.what()});
        }
    }
    return SyntheticResult{RecordSet(spec.topic_label(), std::move(records)), std::move(transcripts),
                           std::move(skipped)};
}

}  // namespace rageval
