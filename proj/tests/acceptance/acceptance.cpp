// One pass/fail line per acceptance criterion. Exit status is the number of
// failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include <fmt/core.h>

#include "fixtures.hpp"
#include "rageval/aggregation.hpp"
#include "rageval/cli.hpp"
#include "rageval/error.hpp"
#include "rageval/judge.hpp"
#include "rageval/metrics.hpp"
#include "rageval/stats.hpp"
#include "rageval/text.hpp"
#include "rageval/topicality.hpp"

namespace fs = std::filesystem;
using namespace rageval;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::vector<std::string> details;

    void check(bool ok, std::string what) {
        pass = pass && ok;
        details.push_back(fmt::format("{} {}", ok ? "ok  " : "FAIL", what));
    }
    void note(std::string what) { details.push_back("info " + what); }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

stats::BootstrapConfig boot(std::size_t b, std::uint64_t seed) {
    stats::BootstrapConfig c;
    c.resamples = b;
    c.seed = seed;
    return c;
}

// 1 --------------------------------------------------------------------------

void golden_prompts(Outcome& o) {
    const auto t0 = Clock::now();
    const auto emma = judge::parse_faithfulness_verdicts(fixtures::emma_transcript(), 5);
    o.check(emma.verdicts == std::vector<bool>{false, true, false, true, true} && faithfulness_score(emma) == 0.6,
            fmt::format("Emma verdicts -> {}", faithfulness_score(emma)));

    const EvalRecord emma_record{"emma", "q", "a", {std::string(fixtures::kEmmaContext)}, std::nullopt};
    const auto statements = fixtures::emma_statements();
    o.check(judge::build_faithfulness_prompt(emma_record, statements).text ==
                fixtures::read_data_file("emma_faithfulness_prompt.txt"),
            "Emma faithfulness prompt equals golden rendering");

    const auto newton = judge::parse_recall_classification(fixtures::newton_classification(), 3);
    o.check(recall_score(newton) == 2.0 / 3.0 && text::segment_sentences(fixtures::kNewtonAnswer).size() == 3,
            fmt::format("Newton recall -> {}", recall_score(newton)));

    const auto atlantis = judge::parse_precision_extraction(fixtures::atlantis_candidates());
    const std::vector<std::string> ctx{std::string(fixtures::kAtlantisContext)};
    const double p = precision_score(atlantis, ctx, *hash_embedder(256), {});
    o.check(atlantis.insufficient && p == 0.0, fmt::format("Atlantis precision -> {}", p));

    const auto q = judge::parse_generated_question(fixtures::pslv_transcript());
    o.check(q == fixtures::kPslvQuestion, "PSLV question extracted verbatim");

    const double elapsed = seconds_since(t0);
    o.check(elapsed < 5.0, fmt::format("runtime {:.3f} s < 5 s", elapsed));
}

// 2 --------------------------------------------------------------------------

void metric_bounds(Outcome& o) {
    constexpr int kTrials = 1000;
    std::mt19937_64 rng(2024);
    auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
    const auto embedder = hash_embedder(256);
    const std::vector<std::string> words{"Alpha", "beta", "gamma", "delta", "tides", "moon", "coral", "reef",
                                         "bone", "mass", "age", "cloud", "sales", "court", "ball", "the"};
    auto sentence = [&] {
        std::string s = words[pick(words.size())];
        for (std::size_t i = 0, n = 2 + pick(8); i < n; ++i) {
            s += " " + words[pick(words.size())];
        }
        return s + ".";
    };
    const std::vector<std::string> yes{"Yes", "yes", "YES.", "Yes,", "yes."};
    const std::vector<std::string> no{"No", "no", "NO.", "No,", "no."};

    std::array<int, 4> violations{};
    std::array<int, 4> accepted{};
    for (int t = 0; t < kTrials; ++t) {
        // Faithfulness
        const auto n = 1 + pick(15);
        std::string faith = pick(2) == 0 ? "" : fixtures::emma_transcript() + "\n";
        faith += "Final verdict for each statement in order:";
        for (std::size_t i = 0; i < n; ++i) {
            faith += " " + (pick(2) == 0 ? yes[pick(yes.size())] : no[pick(no.size())]);
        }
        const double f = faithfulness_score(judge::parse_faithfulness_verdicts(faith, n));
        ++accepted[0];
        violations[0] += (f < 0.0 || f > 1.0) ? 1 : 0;

        // Recall
        std::string recall = "Classification:\n";
        for (std::size_t i = 0; i < n; ++i) {
            recall += (pick(2) == 0 ? std::to_string(i + 1) + ". " : "- ") + sentence() + " So " +
                      (pick(2) == 0 ? "[Supported by Context]" : "[Not Supported by Context]") + "\n";
        }
        const double r = recall_score(judge::parse_recall_classification(recall, n));
        ++accepted[1];
        violations[1] += (r < 0.0 || r > 1.0) ? 1 : 0;

        // Precision
        std::vector<std::string> contexts;
        for (std::size_t c = 0, k = pick(4); c < k; ++c) {
            contexts.push_back(sentence() + " " + sentence());
        }
        std::string cand = "Candidate Sentences:\n";
        if (pick(5) == 0) {
            cand += "Insufficient Information";
        } else {
            for (std::size_t c = 0, k = 1 + pick(5); c < k; ++c) {
                cand += "- " + sentence() + "\n";
            }
        }
        const double pr = precision_score(judge::parse_precision_extraction(cand), contexts, *embedder, {});
        ++accepted[2];
        violations[2] += (pr < 0.0 || pr > 1.0) ? 1 : 0;

        // Relevance
        judge::GeneratedQuestions qs;
        for (int i = 0; i < 3; ++i) {
            qs.questions.push_back(judge::parse_generated_question("Question:\n" + sentence()));
        }
        const double rel = answer_relevance_score(sentence(), qs, *embedder);
        ++accepted[3];
        violations[3] += (rel < 0.0 || rel > 1.0) ? 1 : 0;
    }
    for (const auto kind : kAllMetrics) {
        const auto k = static_cast<std::size_t>(kind);
        o.check(accepted[k] == kTrials && violations[k] == 0,
                fmt::format("{}: {} transcripts, {} out of [0,1]", metric_name(kind), accepted[k], violations[k]));
    }
}

// 3 --------------------------------------------------------------------------

void bootstrap_correctness(Outcome& o) {
    const auto values = fixtures::beta_sample(50, 2.0, 5.0, 1);
    double worst = 0.0;
    for (const std::uint64_t seed : {1ULL, 7ULL, 99ULL}) {
        const auto s = stats::bootstrap_summary(values, boot(2000, seed));
        const auto ref = fixtures::oracle_resample_stats(values, values.size(), 2000, seed);
        for (const double d : {s.boot_mean - ref.mean, s.boot_variance - ref.variance, s.ci_low - ref.ci_low,
                               s.ci_high - ref.ci_high}) {
            worst = std::max(worst, std::abs(d));
        }
    }
    o.check(worst <= 1e-12, fmt::format("oracle agreement, max |diff| {:.3e} <= 1e-12", worst));

    const std::vector<double> pair{0.0, 1.0};
    constexpr std::size_t kB = 100000;
    const auto s2 = stats::bootstrap_summary(pair, boot(kB, 3));
    const double tol = 4.0 * std::sqrt(0.125 / static_cast<double>(kB));
    o.check(std::abs(s2.boot_mean - 0.5) <= tol,
            fmt::format("size-2 enumeration: grand mean {:.5f} vs 0.5 (tol {:.4f}), variance {:.5f} vs 0.125",
                        s2.boot_mean, tol, s2.boot_variance));

    std::vector<double> scaled(values);
    for (double& x : scaled) {
        x *= 4.0;
    }
    const auto a = stats::bootstrap_summary(values, boot(2000, 5));
    const auto b = stats::bootstrap_summary(scaled, boot(2000, 5));
    o.check(b.boot_mean == 4.0 * a.boot_mean && b.boot_variance == 16.0 * a.boot_variance &&
                b.ci_low == 4.0 * a.ci_low && b.ci_high == 4.0 * a.ci_high,
            "scale equivariance x4: mean, variance and CI exact");
}

// 4 --------------------------------------------------------------------------

void unbiasedness(Outcome& o) {
    const auto t0 = Clock::now();
    const auto values = fixtures::beta_sample(50, 2.0, 5.0, 1);
    const auto u = stats::unbiasedness_check(values, boot(5000, 7));
    const double elapsed = seconds_since(t0);
    o.check(u.delta <= 0.01, fmt::format("|M - mean| = {:.2e} <= 0.01 (sample mean {:.4f})", u.delta, u.empirical_mean));
    o.check(elapsed < 10.0, fmt::format("runtime {:.3f} s < 10 s", elapsed));
}

// 5 --------------------------------------------------------------------------

void coverage(Outcome& o) {
    const auto t0 = Clock::now();
    constexpr int kDatasets = 500;
    constexpr double kTrueMean = 2.0 / 7.0;
    int covered = 0;
    for (int d = 0; d < kDatasets; ++d) {
        const auto values = fixtures::beta_sample(50, 2.0, 5.0, 1000 + static_cast<std::uint64_t>(d));
        const auto s = stats::bootstrap_summary(values, boot(1000, static_cast<std::uint64_t>(d)));
        covered += (s.ci_low <= kTrueMean && kTrueMean <= s.ci_high) ? 1 : 0;
    }
    const double rate = static_cast<double>(covered) / kDatasets;
    const double elapsed = seconds_since(t0);
    o.check(rate >= 0.88 && rate <= 0.98, fmt::format("coverage {}/{} = {:.3f} in [0.88, 0.98]", covered, kDatasets, rate));
    o.check(elapsed < 60.0, fmt::format("runtime {:.3f} s < 60 s", elapsed));
}

// 6 --------------------------------------------------------------------------

void convergence(Outcome& o) {
    const auto values = fixtures::beta_sample(50, 2.0, 5.0, 1);
    const std::vector<std::size_t> checkpoints{500, 1000, 2000, 4000};
    const auto t = stats::convergence_trace(values, boot(4000, 7), checkpoints);
    std::string trace;
    for (const auto& p : t.points) {
        trace += fmt::format(" {}:{:.5f}", p.resamples, p.std_error);
    }
    o.check(t.final_relative_change < 0.05,
            fmt::format("final relative change {:.4f} < 0.05; trace{}", t.final_relative_change, trace));

    const bool exact = stats::bootstrap_warnings(29, 1000).size() == 1 && stats::bootstrap_warnings(30, 1000).empty() &&
                       stats::bootstrap_warnings(30, 999).size() == 1 && stats::bootstrap_warnings(29, 999).size() == 2;
    const auto small = stats::bootstrap_summary(std::vector<double>(values.begin(), values.begin() + 29), boot(999, 1));
    o.check(exact && small.warnings.size() == 2, "warnings fire at n = 29 and B = 999, not at n = 30 or B = 1000");
}

// 7 --------------------------------------------------------------------------

void aggregation(Outcome& o) {
    const auto record = fixtures::bone_mass_record();
    const auto scores = fixtures::bone_mass_scores();
    const auto enhanced = enhance_answer(record, scores);
    o.check(enhanced.rendered == fixtures::read_data_file("bone_mass_enhanced.txt"),
            "bone-mass enhanced text matches golden asset byte for byte");

    const auto scorer = linear_pair_scorer({1, 1, 1, 1}, 0);
    const double exact_sum = scores.faithfulness + scores.answer_relevance + scores.retrieval_recall +
                             scores.retrieval_precision;
    const double logit = scorer->score(record.query, enhanced.rendered);
    o.check(std::abs(logit - exact_sum) <= 1e-12, fmt::format("bone-mass logit {:.16f} = four-score sum", logit));
    o.note(fmt::format("bone-mass logit differs from 2.2926 by {:.2e}; the 2.2926 target holds for the four scores "
                       "rounded to 4 places",
                       std::abs(logit - 2.2926)));
    const MetricScores rounded{1.0, 0.9532, 0.2727, 0.0667};
    const double rounded_logit = scorer->score(record.query, enhance_answer(record, rounded).rendered);
    o.check(std::abs(rounded_logit - 2.2926) <= 1e-9, fmt::format("rounded-score logit {:.12f} = 2.2926 +- 1e-9", rounded_logit));

    o.check(std::abs(expit(8.72) - 0.99984) <= 1e-5, fmt::format("expit(8.72) = {:.6f}", expit(8.72)));

    std::mt19937_64 rng(8);
    std::normal_distribution<double> logits(0.0, 6.0);
    int stable = 0;
    for (int set = 0; set < 100; ++set) {
        std::vector<RankedRecord> a;
        std::vector<RankedRecord> b;
        for (int i = 0; i < 25; ++i) {
            const double x = logits(rng);
            a.push_back({fmt::format("r{:02}", i), {x, expit(x)}});
            b.push_back({fmt::format("r{:02}", i), {expit(x), expit(x)}});
        }
        const auto ra = rank_records(a);
        const auto rb = rank_records(b);
        stable += std::equal(ra.begin(), ra.end(), rb.begin(), [](const auto& l, const auto& r) { return l.id == r.id; })
                      ? 1
                      : 0;
    }
    o.check(stable == 100, fmt::format("ranking unchanged under expit on {}/100 random logit sets", stable));
}

// 8 --------------------------------------------------------------------------

double mean_logit(const RecordSet& set, const SetEvaluation& eval, const PairScorer& scorer) {
    double total = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        const auto enhanced = enhance_answer(set.records()[i], eval.records[i].metrics);
        total += aggregate(set.records()[i], enhanced, scorer).logit;
    }
    return total / static_cast<double>(set.size());
}

void pr_vs_ir(Outcome& o) {
    const std::vector<fixtures::EngineeredCorpus> corpora{fixtures::engineered_corpus(fixtures::relevant_profile()),
                                                          fixtures::engineered_corpus(fixtures::irrelevant_profile())};
    const auto providers = fixtures::engineered_providers(corpora);
    EvalConfig cfg;
    cfg.generation.seed = 7;
    const auto pr = evaluate_set(corpora[0].set, providers, cfg);
    const auto ir = evaluate_set(corpora[1].set, providers, cfg);
    const double lp = mean_logit(corpora[0].set, pr, *providers.scorer);
    const double li = mean_logit(corpora[1].set, ir, *providers.scorer);
    o.check(lp > li, fmt::format("mean logit PR {:.4f} > IR {:.4f}", lp, li));
    for (const auto kind : {MetricKind::AnswerRelevance, MetricKind::RetrievalRecall, MetricKind::RetrievalPrecision}) {
        const double d = *pr.mean(kind) - *ir.mean(kind);
        o.check(d >= 0.3, fmt::format("{}: PR {:.3f} - IR {:.3f} = {:.3f} >= 0.3", metric_name(kind), *pr.mean(kind),
                                      *ir.mean(kind), d));
    }
    const double fp = *pr.mean(MetricKind::Faithfulness);
    const double fi = *ir.mean(MetricKind::Faithfulness);
    o.check(fp >= 0.8 && fi >= 0.8, fmt::format("faithfulness PR {:.3f}, IR {:.3f} both >= 0.8", fp, fi));
}

// 9 --------------------------------------------------------------------------

void topicality(Outcome& o) {
    const auto t0 = Clock::now();
    const std::vector<fixtures::EngineeredCorpus> corpora{fixtures::engineered_corpus(fixtures::positive_profile()),
                                                          fixtures::engineered_corpus(fixtures::adjacent_profile()),
                                                          fixtures::engineered_corpus(fixtures::random_profile())};
    const auto providers = fixtures::engineered_providers(corpora);
    EvalConfig eval;
    eval.generation.seed = 7;
    const std::vector<RecordSet> sets{corpora[0].set, corpora[1].set, corpora[2].set};
    const auto report = run_topicality(sets, providers, eval, boot(1000, 7));
    const auto& pos = corpora[0].set.label();
    const auto& adj = corpora[1].set.label();
    const auto& rnd = corpora[2].set.label();

    for (const auto kind : {MetricKind::AnswerRelevance, MetricKind::RetrievalRecall, MetricKind::RetrievalPrecision}) {
        const auto* c = report.find(pos, rnd, kind);
        o.check(c != nullptr && c->separated,
                fmt::format("{} vs {} separated on {} (delta {:+.3f})", pos, rnd, metric_name(kind), c ? c->delta : 0.0));
    }
    for (const auto kind : {MetricKind::RetrievalRecall, MetricKind::RetrievalPrecision}) {
        const auto* near = report.find(pos, adj, kind);
        const auto* far = report.find(pos, rnd, kind);
        o.check(near && far && std::abs(near->delta) < std::abs(far->delta),
                fmt::format("{}: |delta vs {}| {:.3f} < |delta vs {}| {:.3f}", metric_name(kind), adj,
                            near ? std::abs(near->delta) : 0.0, rnd, far ? std::abs(far->delta) : 0.0));
    }
    const auto text = report.render_text();
    const auto cell = fmt::format("{:.2f}±{:.2f}", report.set_results[0].summary(MetricKind::RetrievalRecall).boot_mean,
                                  report.set_results[0].summary(MetricKind::RetrievalRecall).half_width());
    o.check(text.find(cell) != std::string::npos, fmt::format("report renders m±e cells (e.g. {})", cell));
    const double elapsed = seconds_since(t0);
    o.check(elapsed < 30.0, fmt::format("runtime {:.3f} s < 30 s", elapsed));
}

// 10 -------------------------------------------------------------------------

int run_cli(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    return cli::run(args, out, err);
}

void determinism(Outcome& o, Clock::time_point suite_start) {
    const auto dir = fixtures::scratch_dir("acceptance-e2e");
    auto p = fixtures::positive_profile();
    auto r = fixtures::random_profile();
    p.records = 30;
    r.records = 30;
    const std::vector<fixtures::EngineeredCorpus> corpora{fixtures::engineered_corpus(p), fixtures::engineered_corpus(r)};
    const auto config = (dir / "config.json").string();
    const auto sales = (dir / "sales.jsonl").string();
    const auto random = (dir / "random.jsonl").string();
    fixtures::write_file(config, fixtures::stub_config_json(corpora, 0).dump(2));
    fixtures::write_file(sales, write_record_set(corpora[0].set));
    fixtures::write_file(random, write_record_set(corpora[1].set));

    auto pipeline = [&](const std::string& out) {
        const std::string report = (fs::path(out) / "evaluate.json").string();
        const std::vector<std::vector<std::string>> commands{
            {"evaluate", sales},
            {"aggregate", report},
            {"bootstrap", report, "--metric", "answer_relevance"},
            {"topicality", sales, random},
        };
        int worst = 0;
        for (auto args : commands) {
            args.insert(args.end(), {"--config", config, "--seed", "7", "--out", out});
            worst = std::max(worst, run_cli(args));
        }
        return worst;
    };
    // Both runs write to the same directory so manifests, which name their
    // input paths, are comparable too.
    const auto out = (dir / "out").string();
    auto snapshot = [&] {
        std::map<std::string, std::string> files;
        for (const auto& e : fs::directory_iterator(out)) {
            files[e.path().filename().string()] = fixtures::read_file(e.path());
        }
        return files;
    };
    const int ca = pipeline(out);
    const auto first = snapshot();
    fs::remove_all(out);
    const int cb = pipeline(out);
    const auto second = snapshot();
    o.check(ca == 0 && cb == 0, fmt::format("four commands exit 0 twice (codes {} and {})", ca, cb));

    std::size_t identical = 0;
    for (const auto& [name, body] : first) {
        const auto it = second.find(name);
        identical += it != second.end() && it->second == body ? 1 : 0;
    }
    o.check(first.size() == 12 && second.size() == first.size() && identical == first.size(),
            fmt::format("{}/{} output files byte-identical across runs", identical, first.size()));
    const double elapsed = seconds_since(suite_start);
    o.check(elapsed < 120.0, fmt::format("acceptance suite so far {:.1f} s < 120 s, stub providers only", elapsed));
}

}  // namespace

int main() {
    const auto suite_start = Clock::now();
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
        {"golden prompts and parsers", golden_prompts},
        {"metric bounds under fuzzing", metric_bounds},
        {"bootstrap correctness", bootstrap_correctness},
        {"unbiasedness", unbiasedness},
        {"CI coverage", coverage},
        {"convergence monitoring", convergence},
        {"aggregation", aggregation},
        {"PR vs IR direction", pr_vs_ir},
        {"topicality separation", topicality},
        {"end-to-end determinism", [&](Outcome& o) { determinism(o, suite_start); }},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        const auto t0 = Clock::now();
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.check(false, std::string("threw: ") + e.what());
        }
        failed += o.pass ? 0 : 1;
        std::cout << fmt::format("[{}] {:>2}. {} ({:.2f} s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                                 seconds_since(t0));
        for (const auto& d : o.details) {
            std::cout << "        " << d << "\n";
        }
    }
    std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed),
                             criteria.size());
    return failed;
}
