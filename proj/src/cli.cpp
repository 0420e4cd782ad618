#include "rageval/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "rageval/aggregation.hpp"
#include "rageval/config.hpp"
#include "rageval/corpus.hpp"
#include "rageval/error.hpp"
#include "rageval/report.hpp"
#include "rageval/stats.hpp"
#include "rageval/templates.hpp"
#include "rageval/text.hpp"
#include "rageval/topicality.hpp"

namespace rageval::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> parallelism;
    std::string out_dir = ".";
    std::string providers;
    std::string label;
    std::string metric;
    bool retain_means = false;
    std::vector<std::string> inputs;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json_file(const fs::path& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + " is not valid JSON: " + e.what());
    }
}

void write_atomic(const fs::path& path, std::string_view content) {
    const auto tmp = fs::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot write " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            throw Error("write to " + tmp.string() + " failed");
        }
    }
    fs::rename(tmp, path);
}

class Run {
public:
    Run(std::string command, Options opts) : command_(std::move(command)), opts_(std::move(opts)) {
        cfg_ = opts_.config_path.empty() ? RunConfig{} : load_run_config(opts_.config_path);
        if (!opts_.config_path.empty()) {
            note_input(opts_.config_path);
        }
        if (opts_.seed) {
            cfg_.seed = *opts_.seed;
        }
        if (opts_.parallelism) {
            if (*opts_.parallelism == 0) {
                throw ConfigError("--parallelism must be positive");
            }
            cfg_.parallelism = *opts_.parallelism;
        }
        if (!opts_.providers.empty()) {
            const auto kind = provider_kind_from_name(opts_.providers);
            if (!kind) {
                throw ConfigError("--providers must be stub or http");
            }
            cfg_.providers = *kind;
        }
        fs::create_directories(opts_.out_dir);
    }

    const RunConfig& config() const { return cfg_; }
    const Options& options() const { return opts_; }

    std::string read_input(const std::string& path) {
        auto body = read_file(path);
        inputs_.push_back({{"path", path}, {"fnv1a64", fmt::format("{:016x}", text::fnv1a64(body))}});
        return body;
    }

    void note_input(const std::string& path) { read_input(path); }

    void emit(const std::string& name, std::string_view content) {
        write_atomic(fs::path(opts_.out_dir) / name, content);
        outputs_.push_back(name);
    }

    void emit_json(const std::string& name, const ojson& doc) { emit(name, doc.dump(2) + "\n"); }

    void finish(const ojson& providers = nullptr) {
        ojson manifest{{"manifest_version", 1},
                       {"tool", "rageval"},
                       {"command", command_},
                       {"config", run_config_json(cfg_)},
                       {"providers", providers},
                       {"inputs", inputs_},
                       {"outputs", outputs_}};
        write_atomic(fs::path(opts_.out_dir) / (command_ + ".manifest.json"), manifest.dump(2) + "\n");
    }

private:
    std::string command_;
    Options opts_;
    RunConfig cfg_;
    ojson inputs_ = ojson::array();
    std::vector<std::string> outputs_;
};

ojson provider_ids(const Providers& p) {
    ojson out = ojson::object();
    out["generator"] = p.generator ? ojson(p.generator->identifier()) : ojson(nullptr);
    out["embedder"] = p.embedder ? ojson(p.embedder->identifier()) : ojson(nullptr);
    out["scorer"] = p.scorer ? ojson(p.scorer->identifier()) : ojson(nullptr);
    return out;
}

std::string models_of(const Providers& p) {
    std::string out = p.generator ? p.generator->identifier() : std::string();
    if (p.embedder) {
        out += (out.empty() ? "" : " + ") + p.embedder->identifier();
    }
    return out;
}

RecordSet load_records(Run& run, const std::string& path, std::optional<std::string> label, std::ostream& err) {
    const auto body = run.read_input(path);
    std::istringstream in(body);
    const auto ext = text::to_lower(fs::path(path).extension().string());
    const auto format = ext == ".tsv" ? RecordFormat::Delimited : RecordFormat::JsonLines;
    auto load = load_record_set(in, format, label.value_or(fs::path(path).stem().string()));
    if (!load.issues.empty()) {
        const auto& first = load.issues.front();
        if (run.config().strict_parsing) {
            throw ConfigError(fmt::format("{} row {}: {} ({} malformed rows; set strict_parsing false to skip them)",
                                          path, first.row, first.message, load.issues.size()));
        }
        for (const auto& issue : load.issues) {
            err << fmt::format("warning: {} row {} skipped: {}\n", path, issue.row, issue.message);
        }
    }
    if (load.set.empty()) {
        throw EmptyInputError(path + " contains no records");
    }
    return std::move(load.set);
}

int cmd_evaluate(Run& run, std::ostream& out, std::ostream& err) {
    const auto& opts = run.options();
    if (opts.inputs.size() != 1) {
        throw ConfigError("evaluate takes exactly one record file");
    }
    const auto set = load_records(run, opts.inputs.front(),
                                  opts.label.empty() ? std::nullopt : std::optional<std::string>(opts.label), err);
    const auto providers = make_providers(run.config());
    const auto eval = evaluate_set(set, providers, run.config().eval_config());
    const auto models = models_of(providers);
    run.emit_json("evaluate.json", report::evaluation_json(set, eval, models));
    const auto table = report::evaluation_text(eval, models);
    run.emit("evaluate.txt", table);
    run.finish(provider_ids(providers));
    out << table;
    return kOk;
}

int cmd_aggregate(Run& run, std::ostream& out, std::ostream&) {
    const auto& opts = run.options();
    if (opts.inputs.size() != 1) {
        throw ConfigError("aggregate takes exactly one evaluation report");
    }
    run.note_input(opts.inputs.front());
    const auto input = report::read_evaluation(read_json_file(opts.inputs.front()));
    if (input.records.empty()) {
        throw EmptyInputError(opts.inputs.front() + " contains no records");
    }
    const auto providers = make_providers(run.config());
    if (!providers.scorer) {
        throw ConfigError("aggregate needs a pair scorer");
    }

    std::vector<RankedRecord> ranked;
    std::map<std::string, report::AggregateRow> rows;
    for (const auto& sr : input.records) {
        MetricScores scores;
        for (std::size_t k = 0; k < kAllMetrics.size(); ++k) {
            if (!sr.scores[k]) {
                throw MissingFieldError("record '" + sr.record.id + "' has no usable " +
                                        std::string(metric_name(kAllMetrics[k])) + " score");
            }
        }
        scores.faithfulness = *sr.scores[0];
        scores.answer_relevance = *sr.scores[1];
        scores.retrieval_recall = *sr.scores[2];
        scores.retrieval_precision = *sr.scores[3];
        const auto enhanced = enhance_answer(sr.record, scores, run.config().contexts_included);
        const auto agg = aggregate(sr.record, enhanced, *providers.scorer);
        ranked.push_back({sr.record.id, agg});
        rows[sr.record.id] = report::AggregateRow{sr.record.id, scores, agg, enhanced.rendered};
    }

    std::vector<report::AggregateRow> ordered;
    double total = 0.0;
    for (const auto& r : rank_records(std::move(ranked))) {
        ordered.push_back(rows.at(r.id));
        total += r.score.logit;
    }
    const double mean_logit = total / static_cast<double>(ordered.size());
    const auto scorer = providers.scorer->identifier();
    run.emit_json("aggregate.json", report::aggregate_json(input.label, ordered, scorer, mean_logit));
    const auto table = report::aggregate_text(input.label, ordered, scorer, mean_logit);
    run.emit("aggregate.txt", table);
    run.finish(provider_ids(providers));
    out << table;
    return kOk;
}

std::vector<double> parse_values(const std::string& body, const std::string& path, const std::string& metric,
                                 std::string& label) {
    const auto first = body.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return {};
    }
    std::vector<double> values;
    if (body[first] == '[' || body[first] == '{') {
        json doc;
        try {
            doc = json::parse(body);
        } catch (const json::parse_error& e) {
            throw ConfigError(path + " is not valid JSON: " + e.what());
        }
        if (doc.is_object() && doc.contains("records")) {
            if (metric.empty()) {
                throw ConfigError(path + " is an evaluation report; choose a metric with --metric");
            }
            const auto kind = metric_from_name(metric);
            if (!kind) {
                throw ConfigError("unknown metric '" + metric + "'");
            }
            const auto input = report::read_evaluation(doc);
            label = input.label + "/" + metric;
            for (const auto& r : input.records) {
                if (const auto& s = r.scores[static_cast<std::size_t>(*kind)]) {
                    values.push_back(*s);
                }
            }
            return values;
        }
        if (doc.is_object()) {
            if (const auto l = doc.find("label"); l != doc.end() && l->is_string()) {
                label = l->get<std::string>();
            }
            if (!doc.contains("values")) {
                throw MissingFieldError(path + " has no 'values' field");
            }
            doc = doc["values"];
        }
        if (!doc.is_array()) {
            throw ConfigError(path + " values must be an array of numbers");
        }
        for (const auto& v : doc) {
            if (!v.is_number()) {
                throw ConfigError(path + " values must be an array of numbers");
            }
            values.push_back(v.get<double>());
        }
        return values;
    }
    std::size_t line_no = 0;
    for (const auto& line : text::split_lines(body)) {
        ++line_no;
        const auto t = text::trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        const auto v = text::parse_double(t);
        if (!v) {
            throw ConfigError(fmt::format("{} line {}: '{}' is not a number", path, line_no, t));
        }
        values.push_back(*v);
    }
    return values;
}

int cmd_bootstrap(Run& run, std::ostream& out, std::ostream&) {
    const auto& opts = run.options();
    if (opts.inputs.size() != 1) {
        throw ConfigError("bootstrap takes exactly one values file");
    }
    const auto& path = opts.inputs.front();
    std::string label = opts.label.empty() ? fs::path(path).stem().string() : opts.label;
    auto parsed_label = label;
    const auto values = parse_values(run.read_input(path), path, opts.metric, parsed_label);
    if (opts.label.empty()) {
        label = parsed_label;
    }
    if (values.empty()) {
        throw EmptyInputError(path + " contains no values");
    }

    const auto boot = run.config().bootstrap_config();
    const auto summary = stats::bootstrap_summary(values, boot, opts.retain_means);
    std::optional<stats::ConvergenceTrace> trace;
    if (!run.config().checkpoints.empty()) {
        auto checkpoints = run.config().checkpoints;
        trace = stats::convergence_trace(values, boot, checkpoints);
    }
    std::optional<stats::UnbiasednessReport> unbiased;
    if (!boot.resample_size || *boot.resample_size == values.size()) {
        unbiased = stats::unbiasedness_check(values, boot);
    }

    run.emit_json("bootstrap.json", report::bootstrap_json(label, summary, trace, unbiased));
    const auto table = report::bootstrap_text(label, summary, trace, unbiased);
    run.emit("bootstrap.txt", table);
    run.finish();
    out << table;
    return kOk;
}

int cmd_topicality(Run& run, std::ostream& out, std::ostream& err) {
    const auto& opts = run.options();
    if (opts.inputs.size() < 2) {
        throw ConfigError("topicality needs at least two record files");
    }
    std::vector<RecordSet> sets;
    std::map<std::string, int> seen;
    for (const auto& path : opts.inputs) {
        auto label = fs::path(path).stem().string();
        if (const int n = ++seen[label]; n > 1) {
            label += "#" + std::to_string(n);
        }
        sets.push_back(load_records(run, path, label, err));
    }
    const auto providers = make_providers(run.config());
    TopicalityConfig tcfg;
    tcfg.min_effect = run.config().min_effect;
    const auto report =
        run_topicality(sets, providers, run.config().eval_config(), run.config().bootstrap_config(), tcfg);
    run.emit_json("topicality.json", report::topicality_json(report));
    const auto table = report.render_text();
    run.emit("topicality.txt", table);
    run.finish(provider_ids(providers));
    out << table;
    return kOk;
}

int cmd_synth(Run& run, std::ostream& out, std::ostream&) {
    const auto& opts = run.options();
    if (opts.inputs.size() != 1) {
        throw ConfigError("synth takes exactly one spec file");
    }
    const auto& path = opts.inputs.front();
    run.note_input(path);
    const auto doc = read_json_file(path);
    if (!doc.is_object()) {
        throw ConfigError(path + " must hold a JSON object");
    }
    std::string label;
    std::string prompt;
    std::int64_t count = 0;
    try {
        label = doc.at("label").get<std::string>();
        count = doc.at("count").get<std::int64_t>();
        if (doc.contains("prompt")) {
            prompt = doc.at("prompt").get<std::string>();
        } else {
            prompt = std::string(templates::get(doc.at("template").get<std::string>()));
        }
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    if (count < 0) {
        throw ConfigError(path + ": count must be positive");
    }
    const SyntheticSpec spec(label, prompt, static_cast<std::size_t>(count));
    const auto providers = make_providers(run.config());
    if (!providers.generator) {
        throw ConfigError("synth needs a text generator");
    }
    auto params = run.config().eval_config().generation;
    const auto result = generate_synthetic(spec, *providers.generator, params, run.config().parallelism);

    run.emit(label + ".jsonl", write_record_set(result.set));
    std::string summary = fmt::format("{}: {} records from {} calls\n", label, result.set.size(), spec.count());
    for (const auto& d : result.skipped) {
        summary += fmt::format("skipped call {}: {}\n", d.index, d.message);
    }
    run.emit("synth.txt", summary);
    run.finish(provider_ids(providers));
    out << summary;
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Batch evaluation of retrieval-augmented generation outputs"};
    app.require_subcommand(1);
    Options opts;
    std::uint64_t seed = 0;
    std::size_t parallelism = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "Run configuration (JSON) or a previous run manifest");
        sub->add_option("--seed", seed, "Seed for judge calls and bootstrap resampling");
        sub->add_option("--parallelism", parallelism, "Maximum concurrent provider calls");
        sub->add_option("--out", opts.out_dir, "Output directory")->capture_default_str();
        sub->add_option("--providers", opts.providers, "stub or http")->check(CLI::IsMember({"stub", "http"}));
    };

    auto* evaluate = app.add_subcommand("evaluate", "Score every record of a record file on the four metrics");
    add_common(evaluate);
    evaluate->add_option("--label", opts.label, "Set label (default: file stem)");
    evaluate->add_option("records", opts.inputs, "Record file (.jsonl or .tsv)")->required();

    auto* aggregate_cmd = app.add_subcommand("aggregate", "Rank records of an evaluation report by pair-scorer logit");
    add_common(aggregate_cmd);
    aggregate_cmd->add_option("report", opts.inputs, "evaluate.json from a previous run")->required();

    auto* bootstrap = app.add_subcommand("bootstrap", "Bootstrap mean, variance and CI of metric values");
    add_common(bootstrap);
    bootstrap->add_option("--label", opts.label, "Label for the report");
    bootstrap->add_option("--metric", opts.metric, "Metric to read when the input is an evaluation report");
    bootstrap->add_flag("--retain-means", opts.retain_means, "Include every resample mean in the report");
    bootstrap->add_option("values", opts.inputs, "Values file: numbers per line, JSON array or evaluation report")
        ->required();

    auto* topicality = app.add_subcommand("topicality", "Compare metric distributions across query sets");
    add_common(topicality);
    topicality->add_option("records", opts.inputs, "Two or more record files")->required();

    auto* synth = app.add_subcommand("synth", "Generate a synthetic query set");
    add_common(synth);
    synth->add_option("spec", opts.inputs, "Spec file {label, count, template|prompt}")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kConfig;
    }

    CLI::App* chosen = app.get_subcommands().front();
    if (chosen->count("--seed") > 0) {
        opts.seed = seed;
    }
    if (chosen->count("--parallelism") > 0) {
        opts.parallelism = parallelism;
    }
    const auto name = chosen->get_name();

    try {
        Run run(name, opts);
        if (name == "evaluate") {
            return cmd_evaluate(run, out, err);
        }
        if (name == "aggregate") {
            return cmd_aggregate(run, out, err);
        }
        if (name == "bootstrap") {
            return cmd_bootstrap(run, out, err);
        }
        if (name == "topicality") {
            return cmd_topicality(run, out, err);
        }
        return cmd_synth(run, out, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const RecordSetError& e) {
        err << "input error: " << e.what() << "\n";
        return kConfig;
    } catch (const ProviderError& e) {
        err << "provider error: " << e.what() << "\n";
        return kProvider;
    } catch (const SynthesisError& e) {
        err << "provider error after " << e.completed() << " calls: " << e.what() << "\n";
        return kProvider;
    } catch (const EmptyInputError& e) {
        err << "empty input: " << e.what() << "\n";
        return kEmptyInput;
    } catch (const MissingFieldError& e) {
        err << "missing field: " << e.what() << "\n";
        return kMissingField;
    } catch (const AggregationError& e) {
        err << "scorer error: " << e.what() << "\n";
        return kProvider;
    } catch (const StatsError& e) {
        err << "statistics error: " << e.what() << "\n";
        return kStatsParams;
    } catch (const SetError& e) {
        err << "set error: " << e.what() << "\n";
        return e.provider_failure() ? kProvider : kFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
}

}  // namespace rageval::cli
