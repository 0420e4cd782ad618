#include "rageval/report.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "rageval/error.hpp"

namespace rageval::report {

namespace {

using json = nlohmann::json;

std::string render_table(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> widths;
    for (const auto& row : rows) {
        widths.resize(std::max(widths.size(), row.size()), 0);
        for (std::size_t c = 0; c < row.size(); ++c) {
            widths[c] = std::max(widths[c], row[c].size());
        }
    }
    std::string out;
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            line += row[c];
            if (c + 1 < row.size()) {
                line.append(widths[c] - row[c].size() + 2, ' ');
            }
        }
        out += line + "\n";
    }
    return out;
}

std::string cell(const std::optional<double>& v) { return v ? fmt::format("{:.4f}", *v) : std::string("n/a"); }

ojson metric_result_json(const MetricResult& r) {
    ojson out{{"status", status_name(r.status)}};
    out["score"] = r.ok() ? ojson(r.score) : ojson(nullptr);
    if (r.status == MetricStatus::Failed) {
        out["error"] = r.error;
        out["provider_failure"] = r.provider_failure;
    }
    out["items"] = r.items;
    out["values"] = r.values;
    out["notes"] = r.notes;
    out["transcripts"] = r.transcripts;
    return out;
}

const json& require(const json& obj, const char* key, std::string_view where) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        throw MissingFieldError(std::string(where) + " has no '" + key + "' field");
    }
    return *it;
}

std::string require_string(const json& obj, const char* key, std::string_view where) {
    const auto& v = require(obj, key, where);
    if (!v.is_string()) {
        throw MissingFieldError(std::string(where) + " field '" + key + "' is not a string");
    }
    return v.get<std::string>();
}

}  // namespace

ojson evaluation_json(const RecordSet& set, const SetEvaluation& eval, std::string_view models) {
    ojson records = ojson::array();
    for (std::size_t i = 0; i < eval.records.size(); ++i) {
        const auto& rec = set.records()[i];
        const auto& ev = eval.records[i];
        ojson r{{"id", rec.id}, {"query", rec.query}, {"answer", rec.answer}, {"contexts", rec.contexts}};
        r["ground_truth"] = rec.ground_truth ? ojson(*rec.ground_truth) : ojson(nullptr);
        ojson metrics = ojson::object();
        for (const auto kind : kAllMetrics) {
            metrics[std::string(metric_name(kind))] = metric_result_json(ev.metrics[kind]);
        }
        r["metrics"] = std::move(metrics);
        r["warnings"] = ev.warnings;
        records.push_back(std::move(r));
    }
    ojson means = ojson::object();
    ojson failures = ojson::object();
    for (const auto kind : kAllMetrics) {
        const auto m = eval.mean(kind);
        means[std::string(metric_name(kind))] = m ? ojson(*m) : ojson(nullptr);
        failures[std::string(metric_name(kind))] = eval.failure_count(kind);
    }
    return ojson{{"label", eval.label},
                 {"models", models},
                 {"record_count", eval.records.size()},
                 {"means", means},
                 {"failures", failures},
                 {"failed_records", eval.failed_records},
                 {"records", records}};
}

std::string evaluation_text(const SetEvaluation& eval, std::string_view models) {
    std::vector<std::vector<std::string>> summary{{"Models", "Dataset"}};
    for (const auto kind : kAllMetrics) {
        summary.front().emplace_back(metric_title(kind));
    }
    std::vector<std::string> row{models.empty() ? std::string("-") : std::string(models), eval.label};
    for (const auto kind : kAllMetrics) {
        row.push_back(cell(eval.mean(kind)));
    }
    summary.push_back(std::move(row));

    std::string out = render_table(summary);
    out += fmt::format("\nrecords: {}  fully failed: {}\nfailures:", eval.records.size(), eval.failed_records);
    for (const auto kind : kAllMetrics) {
        out += fmt::format(" {}={}", metric_name(kind), eval.failure_count(kind));
    }
    out += "\n\n";

    std::vector<std::vector<std::string>> detail{{"Record"}};
    for (const auto kind : kAllMetrics) {
        detail.front().emplace_back(metric_title(kind));
    }
    for (const auto& rec : eval.records) {
        std::vector<std::string> r{rec.id};
        for (const auto kind : kAllMetrics) {
            const auto& m = rec.metrics[kind];
            r.push_back(m.ok() ? fmt::format("{:.4f}", m.score) : std::string(status_name(m.status)));
        }
        detail.push_back(std::move(r));
    }
    return out + render_table(detail);
}

EvaluationInput read_evaluation(const json& doc) {
    if (!doc.is_object()) {
        throw MissingFieldError("evaluation report is not a JSON object");
    }
    EvaluationInput out;
    out.label = require_string(doc, "label", "evaluation report");
    const auto& records = require(doc, "records", "evaluation report");
    if (!records.is_array()) {
        throw MissingFieldError("evaluation report field 'records' is not an array");
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        const auto where = "record " + std::to_string(i + 1);
        ScoredRecord sr;
        sr.record.id = require_string(r, "id", where);
        const auto named = "record '" + sr.record.id + "'";
        sr.record.query = require_string(r, "query", named);
        sr.record.answer = require_string(r, "answer", named);
        const auto& contexts = require(r, "contexts", named);
        if (!contexts.is_array()) {
            throw MissingFieldError(named + " field 'contexts' is not an array");
        }
        for (const auto& c : contexts) {
            if (!c.is_string()) {
                throw MissingFieldError(named + " has a non-string context");
            }
            sr.record.contexts.push_back(c.get<std::string>());
        }
        if (const auto gt = r.find("ground_truth"); gt != r.end() && gt->is_string()) {
            sr.record.ground_truth = gt->get<std::string>();
        }
        const auto& metrics = require(r, "metrics", named);
        for (std::size_t k = 0; k < kAllMetrics.size(); ++k) {
            const auto name = std::string(metric_name(kAllMetrics[k]));
            const auto m = metrics.find(name);
            if (m == metrics.end() || !m->is_object()) {
                continue;
            }
            const auto score = m->find("score");
            if (score != m->end() && score->is_number()) {
                sr.scores[k] = score->get<double>();
            }
        }
        out.records.push_back(std::move(sr));
    }
    return out;
}

ojson aggregate_json(std::string_view label, const std::vector<AggregateRow>& rows, std::string_view scorer,
                     double mean_logit) {
    ojson ranked = ojson::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        ranked.push_back({{"rank", i + 1},
                          {"id", r.id},
                          {"logit", r.aggregate.logit},
                          {"normalized", r.aggregate.normalized},
                          {"scores",
                           {{"faithfulness", r.scores.faithfulness},
                            {"answer_relevance", r.scores.answer_relevance},
                            {"retrieval_recall", r.scores.retrieval_recall},
                            {"retrieval_precision", r.scores.retrieval_precision}}},
                          {"enhanced_answer", r.enhanced}});
    }
    return ojson{{"label", label},
                 {"scorer", scorer},
                 {"record_count", rows.size()},
                 {"mean_logit", rows.empty() ? ojson(nullptr) : ojson(mean_logit)},
                 {"ranking", ranked}};
}

std::string aggregate_text(std::string_view label, const std::vector<AggregateRow>& rows, std::string_view scorer,
                           double mean_logit) {
    std::vector<std::vector<std::string>> table{
        {"Rank", "Record", "Faithfulness", "Relevance", "Recall", "Precision", "Logit", "Normalized"}};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        table.push_back({std::to_string(i + 1), r.id, fmt::format("{:.4f}", r.scores.faithfulness),
                         fmt::format("{:.4f}", r.scores.answer_relevance),
                         fmt::format("{:.4f}", r.scores.retrieval_recall),
                         fmt::format("{:.4f}", r.scores.retrieval_precision), fmt::format("{:.4f}", r.aggregate.logit),
                         fmt::format("{:.5f}", r.aggregate.normalized)});
    }
    return fmt::format("{}  scorer: {}  mean logit: {:.4f}\n\n", label, scorer, mean_logit) + render_table(table);
}

ojson summary_json(const stats::BootstrapSummary& s) {
    ojson out{{"empirical_mean", s.empirical_mean},
              {"boot_mean", s.boot_mean},
              {"boot_variance", s.boot_variance},
              {"standard_error", s.standard_error()},
              {"ci_low", s.ci_low},
              {"ci_high", s.ci_high},
              {"ci_level", s.ci_level},
              {"resamples", s.resamples},
              {"n", s.n},
              {"resample_size", s.resample_size},
              {"seed", s.seed},
              {"warnings", s.warnings}};
    if (s.resample_means) {
        out["resample_means"] = *s.resample_means;
    }
    return out;
}

ojson bootstrap_json(std::string_view label, const stats::BootstrapSummary& summary,
                     const std::optional<stats::ConvergenceTrace>& trace,
                     const std::optional<stats::UnbiasednessReport>& unbiased) {
    ojson out{{"label", label}, {"summary", summary_json(summary)}};
    if (trace) {
        ojson points = ojson::array();
        for (const auto& p : trace->points) {
            points.push_back({{"resamples", p.resamples}, {"std_error", p.std_error}});
        }
        out["convergence"] = {{"points", points},
                              {"final_relative_change", std::isfinite(trace->final_relative_change)
                                                            ? ojson(trace->final_relative_change)
                                                            : ojson(nullptr)},
                              {"converged", trace->converged}};
    } else {
        out["convergence"] = nullptr;
    }
    if (unbiased) {
        out["unbiasedness"] = {{"empirical_mean", unbiased->empirical_mean},
                               {"boot_mean", unbiased->boot_mean},
                               {"delta", unbiased->delta},
                               {"tolerance", unbiased->tolerance},
                               {"pass", unbiased->pass}};
    } else {
        out["unbiasedness"] = nullptr;
    }
    return out;
}

std::string bootstrap_text(std::string_view label, const stats::BootstrapSummary& summary,
                           const std::optional<stats::ConvergenceTrace>& trace,
                           const std::optional<stats::UnbiasednessReport>& unbiased) {
    const auto& s = summary;
    std::string out = render_table({
        {"Set", "n", "B", "Size", "Mean", "BootMean", "Variance", "CI"},
        {std::string(label), std::to_string(s.n), std::to_string(s.resamples), std::to_string(s.resample_size),
         fmt::format("{:.6f}", s.empirical_mean), fmt::format("{:.6f}", s.boot_mean),
         fmt::format("{:.6g}", s.boot_variance),
         fmt::format("[{:.6f}, {:.6f}] @ {}", s.ci_low, s.ci_high, s.ci_level)},
    });
    if (trace) {
        out += "\nconvergence of the standard error\n";
        std::vector<std::vector<std::string>> rows{{"B", "StdError"}};
        for (const auto& p : trace->points) {
            rows.push_back({std::to_string(p.resamples), fmt::format("{:.6g}", p.std_error)});
        }
        out += render_table(rows);
        out += fmt::format("final relative change {:.4f}%: {}\n", 100.0 * trace->final_relative_change,
                           trace->converged ? "converged" : "not converged");
    }
    if (unbiased) {
        out += fmt::format("\nunbiasedness: |boot mean - mean| = {:.6g}, tolerance {:.6g}: {}\n", unbiased->delta,
                           unbiased->tolerance, unbiased->pass ? "pass" : "fail");
    }
    for (const auto& w : s.warnings) {
        out += "warning: " + w + "\n";
    }
    return out;
}

ojson topicality_json(const TopicalityReport& report) {
    ojson sets = ojson::array();
    for (const auto& set : report.set_results) {
        ojson metrics = ojson::object();
        for (const auto kind : kAllMetrics) {
            const auto idx = static_cast<std::size_t>(kind);
            auto s = summary_json(set.summary(kind));
            s["failures"] = set.failures[idx];
            s["values"] = set.values[idx];
            metrics[std::string(metric_name(kind))] = std::move(s);
        }
        sets.push_back({{"label", set.label}, {"metrics", metrics}});
    }
    ojson comparisons = ojson::array();
    for (const auto& c : report.comparisons) {
        comparisons.push_back({{"set_a", c.set_a},
                               {"set_b", c.set_b},
                               {"metric", metric_name(c.metric)},
                               {"delta", c.delta},
                               {"overlap", c.overlap},
                               {"verdict", c.separated ? "separated" : "not separated"},
                               {"non_discriminative_expected", c.metric == MetricKind::Faithfulness}});
    }
    return ojson{{"models", report.models},
                 {"bootstrap",
                  {{"resamples", report.bootstrap.resamples},
                   {"resample_size", report.bootstrap.resample_size ? ojson(*report.bootstrap.resample_size)
                                                                    : ojson(nullptr)},
                   {"seed", report.bootstrap.seed},
                   {"ci_level", report.bootstrap.ci_level}}},
                 {"min_effect", report.min_effect},
                 {"sets", sets},
                 {"comparisons", comparisons}};
}

}  // namespace rageval::report
