#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "rageval/error.hpp"

#ifndef RAGEVAL_TEST_DATA_DIR
#error "RAGEVAL_TEST_DATA_DIR must point at tests/data"
#endif

namespace fixtures {

std::vector<std::string> emma_statements() {
    return {"Emma is studying mechanical engineering.", "Emma is working on a project related to coral reefs.",
            "Emma often attends computer science workshops.", "Emma collaborates with other researchers.",
            "Emma's research focuses on marine ecosystems."};
}

std::string emma_transcript() {
    return "1. Emma is studying mechanical engineering.\n"
           "Explanation: The context specifies that Emma is specializing in marine biology, not mechanical "
           "engineering. There is no information suggesting she is studying mechanical engineering.\n"
           "Verdict: No.\n\n"
           "2. Emma is working on a project related to coral reefs.\n"
           "Explanation: It is mentioned that Emma is conducting her thesis on coral bleaching, which directly "
           "relates to coral reefs.\n"
           "Verdict: Yes.\n\n"
           "3. Emma often attends computer science workshops.\n"
           "Explanation: The context only mentions that Emma attends seminars related to marine ecosystems. There is "
           "no mention of her attending computer science workshops.\n"
           "Verdict: No.\n\n"
           "4. Emma collaborates with other researchers.\n"
           "Explanation: The context explicitly states that Emma often collaborates with other researchers to "
           "publish her findings.\n"
           "Verdict: Yes.\n\n"
           "5. Emma's research focuses on marine ecosystems.\n"
           "Explanation: Emma's interest in coral reefs and her participation in seminars related to marine "
           "ecosystems suggest that her research focuses on marine ecosystems.\n"
           "Verdict: Yes.\n\n"
           "Final verdict for each statement in order: No. Yes. No. Yes. Yes.";
}

std::string newton_classification() {
    return "Classification:\n"
           "1. Isaac Newton was an English mathematician, physicist, and astronomer. This information is in the "
           "context. So [Supported by Context]\n"
           "2. He is known for writing \"Philosophiæ Naturalis Principia Mathematica.\" This is explicitly mentioned "
           "in the context. So [Supported by Context]\n"
           "3. Newton invented calculus independently of Leibniz. The context mentions Newton shares credit with "
           "Leibniz for developing calculus but does not state he did it independently. So [Not Supported by "
           "Context]";
}

std::string curie_classification() {
    return "Classification:\n"
           "1. Marie Curie was a Polish physicist who won the Nobel Prize twice. This is explicitly mentioned in the "
           "context. So [Supported by Context]\n"
           "2. She discovered the elements polonium and radium. This is explicitly mentioned in the context. So "
           "[Supported by Context]\n"
           "3. Curie was the first person to win Nobel Prizes in two different fields. This is explicitly mentioned "
           "in the context. So [Supported by Context]";
}

std::string tides_candidates() {
    return "Candidate Sentences:\n"
           "- The gravitational pull of the moon and the sun causes the tides to rise and fall.\n"
           "- The moon's gravity has a greater effect because it is closer to the Earth, creating high and low "
           "tides.";
}

std::string atlantis_candidates() { return "Candidate Sentences:\nInsufficient Information"; }

std::string pslv_transcript() {
    return "Question:\nWhen is the scheduled launch date and time for the PSLV-C56 mission, and where will it be "
           "launched from?";
}

EvalRecord bone_mass_record() {
    EvalRecord r;
    r.id = "bone-mass";
    r.query = "At about what age do adults normally begin to lose bone mass?";
    r.answer =
        "Based on the given context, adults typically begin to lose bone mass around the age of 40. The key points "
        "are: - Bone mass reaches its peak during young adulthood, and then there is a slow but steady loss of bone "
        "beginning about age 40. - After about age 30, people can start to lose bone faster than their body makes "
        "it, which can weaken the bones and increase the risk of breakage. - The reduction of bone mass begins "
        "between ages 30 and 40, and continues to decline. So the summarized response is that adults normally begin "
        "to lose bone mass around the age of 40.";
    r.contexts = {
        "Age. There’s no way around it: loss of bone mass comes with age, laying the groundwork for low bone density "
        "and the potential of osteoporosis. We typically lose bone mass starting at age 40 and one in two women and "
        "one in four men over the age of 50 will fracture a bone at some point.",
        "After about age 30, you can start to lose bone faster than your body makes it, which can weaken the bones "
        "and increase the risk of breakage. Some bone loss is natural as men and women age, but women are at higher "
        "risk of significant bone loss.",
        "Bone mass reaches its peak during young adulthood. Then, after a period of stability, there is a slow but "
        "steady loss of bone beginning about age 40. In women, normal aging and menopause significantly increase "
        "susceptibility to osteoporosis.",
        "In adults, this can take ten years. Until our mid-20s, bone density is still increasing. But at 35 bone "
        "loss begins as part of the natural ageing process. This becomes more rapid in post-menopausal women and can "
        "cause the bone-thinning condition osteoporosis.",
        "The reduction of bone mass begins between ages 30 and 40, and continues to decline. Women lose about 8% of "
        "skeletal mass every decade, while men lose about 3%. Epiphyses, vertebrae, and the jaws lose more mass than "
        "other sites, resulting in fragile limbs, reduction in height, and loss of teeth.",
    };
    return r;
}

rageval::MetricScores bone_mass_scores() {
    rageval::MetricScores s;
    s.answer_relevance = 0.9531866263993314;
    s.retrieval_precision = 0.06666666666666667;
    s.retrieval_recall = 0.2727272727272727;
    s.faithfulness = 1.0;
    return s;
}

std::string read_data_file(std::string_view name) {
    return read_file(std::filesystem::path(RAGEVAL_TEST_DATA_DIR) / name);
}

std::filesystem::path scratch_dir(std::string_view name) {
    const auto dir = std::filesystem::temp_directory_path() / ("rageval-test-" + std::string(name));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TableEmbedder::TableEmbedder(std::map<std::string, std::vector<double>, std::less<>> table)
    : table_(std::move(table)) {}

std::vector<double> TableEmbedder::embed(std::string_view text) const {
    const auto it = table_.find(text);
    if (it == table_.end()) {
        throw rageval::ProviderError("table embedder has no vector for '" + std::string(text) + "'");
    }
    return it->second;
}

std::size_t TableEmbedder::dimension() const { return table_.empty() ? 0 : table_.begin()->second.size(); }

// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view kFaithMarker = "Provide a final verdict for each statement in order";
constexpr std::string_view kRecallMarker = "classify whether the sentence is supported by the given context";
constexpr std::string_view kPrecisionMarker = "Evaluate whether the provided context can answer the given question";
constexpr std::string_view kQuestionMarker = "Generate a question based on the given answer.";

const std::array<std::string, kContextSentences> kContextPool{
    "Amber lanterns glow softly beside quiet harbors.",
    "Copper kettles whistle during brisk winter mornings.",
    "Granite cliffs overlook restless northern seas.",
    "Velvet curtains frame the grand theater stage.",
    "Orchard bees gather nectar before sunset.",
};

const std::array<std::string, kQuestions> kUnrelatedQuestions{
    "Which river crosses a valley near an old mill?",
    "How many bridges span northern canals?",
    "When did lighthouse keepers retire?",
};

// Exactly round(rate * records * per_record) positives, shuffled.
std::vector<std::vector<bool>> allocate(double rate, std::size_t records, std::size_t per_record,
                                        std::uint64_t seed) {
    const std::size_t total = records * per_record;
    const auto positives = static_cast<std::size_t>(std::llround(rate * static_cast<double>(total)));
    std::vector<bool> flat(total, false);
    std::fill(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(std::min(positives, total)), true);
    std::mt19937_64 rng(seed);
    std::shuffle(flat.begin(), flat.end(), rng);
    std::vector<std::vector<bool>> out(records);
    for (std::size_t r = 0; r < records; ++r) {
        out[r].assign(flat.begin() + static_cast<std::ptrdiff_t>(r * per_record),
                      flat.begin() + static_cast<std::ptrdiff_t>((r + 1) * per_record));
    }
    return out;
}

double share(const std::vector<bool>& flags) {
    return static_cast<double>(std::count(flags.begin(), flags.end(), true)) / static_cast<double>(flags.size());
}

}  // namespace

EngineeredCorpus engineered_corpus(const TopicProfile& p) {
    const auto faith = allocate(p.faithfulness, p.records, kAnswerSentences, p.seed * 4 + 0);
    const auto relevance = allocate(p.relevance, p.records, kQuestions, p.seed * 4 + 1);
    const auto recall = allocate(p.recall, p.records, kTruthSentences, p.seed * 4 + 2);
    const auto precision = allocate(p.precision, p.records, kContextSentences, p.seed * 4 + 3);

    std::vector<EvalRecord> records;
    EngineeredCorpus out{rageval::RecordSet(p.label, {}), {}, {}, {}, {}, {}};
    for (std::size_t i = 0; i < p.records; ++i) {
        char tag_buf[16];
        std::snprintf(tag_buf, sizeof tag_buf, "%s%03zu", p.tag_prefix.c_str(), i);
        const std::string tag(tag_buf);

        EvalRecord r;
        r.id = p.label + "-" + tag;
        r.query = "What does the " + tag + " ledger say about quarterly results?";
        r.answer = "Record " + tag +
                   " shows steady growth. Revenue targets were met. Costs stayed within budget. Planning continues "
                   "next quarter.";
        r.ground_truth = "Record " + tag +
                         " was audited in March. Auditors confirmed the totals. Two invoices were reissued. The "
                         "ledger closed on time. No penalties applied.";
        r.contexts.assign(kContextPool.begin(), kContextPool.end());

        std::string verdicts = "Final verdict for each statement in order:";
        for (const bool v : faith[i]) {
            verdicts += v ? " Yes." : " No.";
        }
        out.rules.push_back({{std::string(kFaithMarker), tag}, {verdicts}});

        std::string classification = "Classification:\n";
        for (std::size_t s = 0; s < kTruthSentences; ++s) {
            classification += std::to_string(s + 1) + ". Sentence " + std::to_string(s + 1) + ". So " +
                              (recall[i][s] ? "[Supported by Context]" : "[Not Supported by Context]") + "\n";
        }
        out.rules.push_back({{std::string(kRecallMarker), tag}, {classification}});

        std::string candidates = "Candidate Sentences:\n";
        bool any = false;
        for (std::size_t s = 0; s < kContextSentences; ++s) {
            if (precision[i][s]) {
                candidates += "- " + kContextPool[s] + "\n";
                any = true;
            }
        }
        if (!any) {
            candidates += "Insufficient Information\n";
        }
        out.rules.push_back({{std::string(kPrecisionMarker), tag}, {candidates}});

        std::vector<std::string> questions;
        for (std::size_t q = 0; q < kQuestions; ++q) {
            questions.push_back("Question:\n" + (relevance[i][q] ? r.query : kUnrelatedQuestions[q]));
        }
        out.rules.push_back({{std::string(kQuestionMarker), tag}, questions});

        out.faithfulness.push_back(share(faith[i]));
        out.recall.push_back(share(recall[i]));
        out.precision.push_back(share(precision[i]));
        out.relevant_questions.push_back(
            static_cast<std::size_t>(std::count(relevance[i].begin(), relevance[i].end(), true)));
        records.push_back(std::move(r));
    }
    out.set = rageval::RecordSet(p.label, std::move(records));
    return out;
}

rageval::Providers engineered_providers(std::span<const EngineeredCorpus> corpora) {
    std::vector<rageval::ScriptRule> rules;
    for (const auto& c : corpora) {
        rules.insert(rules.end(), c.rules.begin(), c.rules.end());
    }
    rageval::Providers p;
    p.generator = rageval::scripted_generator(std::move(rules));
    p.embedder = rageval::hash_embedder(kEmbeddingDimension);
    p.scorer = rageval::linear_pair_scorer({1.0, 1.0, 1.0, 1.0}, 0.0);
    return p;
}

nlohmann::json stub_config_json(std::span<const EngineeredCorpus> corpora, std::uint64_t seed) {
    nlohmann::json rules = nlohmann::json::array();
    for (const auto& c : corpora) {
        for (const auto& r : c.rules) {
            rules.push_back({{"contains", r.contains}, {"responses", r.responses}});
        }
    }
    return {{"providers", "stub"},
            {"seed", seed},
            {"stub",
             {{"generator", {{"strict", true}, {"rules", rules}}},
              {"embedder", {{"dimension", kEmbeddingDimension}}},
              {"scorer",
               {{"weights",
                 {{"faithfulness", 1.0}, {"answer_relevance", 1.0}, {"retrieval_recall", 1.0},
                  {"retrieval_precision", 1.0}}},
                {"bias", 0.0}}}}}};
}

TopicProfile positive_profile() { return {"sales", "pos", 50, 0.93, 0.71, 0.61, 0.54, 11}; }
TopicProfile adjacent_profile() { return {"basketball", "adj", 50, 0.94, 0.67, 0.55, 0.43, 12}; }
TopicProfile random_profile() { return {"random", "rnd", 50, 0.93, 0.21, 0.13, 0.09, 13}; }
TopicProfile relevant_profile() { return {"pr", "prl", 50, 0.94, 0.87, 0.76, 0.68, 21}; }
TopicProfile irrelevant_profile() { return {"ir", "irr", 50, 0.94, 0.20, 0.10, 0.12, 22}; }

// ---------------------------------------------------------------------------

namespace {

std::uint64_t splitmix_stream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::size_t bounded(std::mt19937_64& rng, std::size_t n) {
    __extension__ using u128 = unsigned __int128;
    const std::uint64_t range = n;
    while (true) {
        const u128 product = static_cast<u128>(rng()) * range;
        const auto low = static_cast<std::uint64_t>(product);
        if (low >= range || low >= (0 - range) % range) {
            return static_cast<std::size_t>(product >> 64);
        }
    }
}

double quantile(std::vector<double> xs, double p) {
    std::sort(xs.begin(), xs.end());
    const double h = p * static_cast<double>(xs.size() - 1);
    const auto below = static_cast<std::size_t>(h);
    if (below + 1 >= xs.size()) {
        return xs.back();
    }
    return xs[below] + (h - static_cast<double>(below)) * (xs[below + 1] - xs[below]);
}

}  // namespace

OracleStats oracle_resample_stats(std::span<const double> values, std::size_t resample_size, std::size_t resamples,
                                  std::uint64_t seed, double ci_level) {
    if (values.empty()) {
        throw std::invalid_argument("empty values");
    }
    if (resamples < 2) {
        throw std::invalid_argument("need at least two resamples");
    }
    OracleStats out;
    for (std::size_t s = 0; s < resamples; ++s) {
        std::mt19937_64 rng(splitmix_stream(seed, s));
        double total = 0.0;
        for (std::size_t i = 0; i < resample_size; ++i) {
            total += values[bounded(rng, values.size())];
        }
        out.resample_means.push_back(total / static_cast<double>(resample_size));
    }
    double sum = 0.0;
    for (const double m : out.resample_means) {
        sum += m;
    }
    out.mean = sum / static_cast<double>(resamples);
    double ss = 0.0;
    for (const double m : out.resample_means) {
        ss += (m - out.mean) * (m - out.mean);
    }
    out.variance = ss / static_cast<double>(resamples - 1);
    out.ci_low = quantile(out.resample_means, (1.0 - ci_level) / 2.0);
    out.ci_high = quantile(out.resample_means, 1.0 - (1.0 - ci_level) / 2.0);
    return out;
}

std::vector<double> beta_sample(std::size_t n, double a, double b, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::gamma_distribution<double> ga(a, 1.0);
    std::gamma_distribution<double> gb(b, 1.0);
    std::vector<double> out(n);
    for (auto& x : out) {
        const double u = ga(rng);
        x = u / (u + gb(rng));
    }
    return out;
}

std::uint64_t oracle_fnv1a64(std::string_view s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (const unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace fixtures
