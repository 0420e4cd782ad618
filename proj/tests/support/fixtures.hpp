#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rageval/aggregation.hpp"
#include "rageval/corpus.hpp"
#include "rageval/providers.hpp"

namespace fixtures {

using rageval::EvalRecord;

// Worked examples that ship with the judge prompts ------------------------

inline constexpr std::string_view kEmmaContext =
    "Emma is a graduate student specializing in marine biology at Coastal University. She has a keen interest in "
    "coral reefs and is conducting her thesis on coral bleaching. Emma attends several seminars related to marine "
    "ecosystems and is actively involved in field research in the nearby coral reefs. She often collaborates with "
    "other researchers to publish her findings.";

std::vector<std::string> emma_statements();
/// The example's answer section, ending with the final verdict line.
std::string emma_transcript();

inline constexpr std::string_view kNewtonContext =
    "Isaac Newton (25 December 1642 – 20 March 1726/27) was an English mathematician, physicist, astronomer, "
    "alchemist, and author. He is widely recognized as one of the most influential scientists of all time and a key "
    "figure in the scientific revolution. His book \"Philosophiæ Naturalis Principia Mathematica,\" first published "
    "in 1687, laid the foundations of classical mechanics. Newton made seminal contributions to optics and shares "
    "credit with Gottfried Wilhelm Leibniz for developing calculus.";
inline constexpr std::string_view kNewtonAnswer =
    "Isaac Newton was an English mathematician, physicist, and astronomer. He is known for writing \"Philosophiæ "
    "Naturalis Principia Mathematica.\" Newton invented calculus independently of Leibniz.";
std::string newton_classification();

inline constexpr std::string_view kCurieAnswer =
    "Marie Curie was a Polish physicist who won the Nobel Prize twice. She discovered the elements polonium and "
    "radium. Curie was the first person to win Nobel Prizes in two different fields.";
std::string curie_classification();

inline constexpr std::string_view kTidesQuestion = "What causes the tides to rise and fall?";
inline constexpr std::string_view kTidesContext =
    "The gravitational pull of the moon and the sun causes the tides to rise and fall. The moon's gravity has a "
    "greater effect because it is closer to the Earth, creating high and low tides. The sun also plays a role, but "
    "to a lesser extent.";
std::string tides_candidates();

inline constexpr std::string_view kAtlantisQuestion = "What is the capital of Atlantis?";
inline constexpr std::string_view kAtlantisContext =
    "Many myths surround the lost city of Atlantis, but no concrete evidence has ever been found to confirm its "
    "existence. Some legends suggest it was a powerful civilization located in the Atlantic Ocean, but its exact "
    "location and details remain unknown.";
std::string atlantis_candidates();

inline constexpr std::string_view kPslvAnswer =
    "The PSLV-C56 mission is scheduled to be launched on Sunday, 30 July 2023 at 06:30 IST / 01:00 UTC. It will be "
    "launched from the Satish Dhawan Space Centre, Sriharikota, Andhra Pradesh, India.";
inline constexpr std::string_view kPslvQuestion =
    "When is the scheduled launch date and time for the PSLV-C56 mission, and where will it be launched from?";
std::string pslv_transcript();

/// Bone-mass query, answer and five contexts of the enhanced-text example.
EvalRecord bone_mass_record();
/// Scores printed in the enhanced-text example.
rageval::MetricScores bone_mass_scores();

/// Contents of tests/data/<name>.
std::string read_data_file(std::string_view name);

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(std::string_view name);
void write_file(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

// Test providers -----------------------------------------------------------

/// Returns fixed vectors for known texts; unknown texts throw ProviderError.
class TableEmbedder final : public rageval::Embedder {
public:
    explicit TableEmbedder(std::map<std::string, std::vector<double>, std::less<>> table);
    std::vector<double> embed(std::string_view text) const override;
    std::size_t dimension() const override;
    std::string identifier() const override { return "table"; }

private:
    std::map<std::string, std::vector<double>, std::less<>> table_;
};

// Engineered corpora ---------------------------------------------------------

/// Target per-item positive rates for one synthetic query set.
struct TopicProfile {
    std::string label;
    std::string tag_prefix;  // three letters, unique per set
    std::size_t records = 50;
    double faithfulness = 0.93;
    double relevance = 0.7;
    double recall = 0.6;
    double precision = 0.55;
    std::uint64_t seed = 1;
};

/// Per record: 4 answer sentences, 5 ground-truth sentences, 5 context
/// sentences and 3 generated questions.
inline constexpr std::size_t kAnswerSentences = 4;
inline constexpr std::size_t kTruthSentences = 5;
inline constexpr std::size_t kContextSentences = 5;
inline constexpr std::size_t kQuestions = 3;

struct EngineeredCorpus {
    rageval::RecordSet set;
    std::vector<rageval::ScriptRule> rules;
    // Item-level ground truth the scripts encode, for oracle means.
    std::vector<double> faithfulness;
    std::vector<double> recall;
    std::vector<double> precision;
    std::vector<std::size_t> relevant_questions;
};

/// Positives are spread over all items of a metric by a seeded shuffle, so
/// the set-level rate is round(rate * items) / items exactly.
EngineeredCorpus engineered_corpus(const TopicProfile& profile);

inline constexpr std::size_t kEmbeddingDimension = 1024;

/// Scripted generator holding the rules of every corpus, hash embedder and
/// unit-weight linear scorer.
rageval::Providers engineered_providers(std::span<const EngineeredCorpus> corpora);

/// Run configuration selecting stub providers equivalent to
/// engineered_providers(corpora).
nlohmann::json stub_config_json(std::span<const EngineeredCorpus> corpora, std::uint64_t seed);

/// Positive, adjacent and random topic profiles: positive, adjacent and random topic sets.
TopicProfile positive_profile();
TopicProfile adjacent_profile();
TopicProfile random_profile();
/// Relevant versus irrelevant query-passage pairs.
TopicProfile relevant_profile();
TopicProfile irrelevant_profile();

// Statistical oracles -------------------------------------------------------

struct OracleStats {
    double mean = 0.0;
    double variance = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::vector<double> resample_means;
};

/// Plain-loop bootstrap sharing only the documented seed rule with the
/// library: resample s uses mt19937_64 seeded with splitmix(seed, s) and
/// Lemire's bounded draw. Throws std::invalid_argument like the library
/// rejects its inputs.
OracleStats oracle_resample_stats(std::span<const double> values, std::size_t resample_size, std::size_t resamples,
                                  std::uint64_t seed, double ci_level = 0.95);

/// Beta(a, b) sample via two gamma draws.
std::vector<double> beta_sample(std::size_t n, double a, double b, std::uint64_t seed);

/// Independent FNV-1a 64 for checking hash-embedder axes.
std::uint64_t oracle_fnv1a64(std::string_view s);

}  // namespace fixtures
