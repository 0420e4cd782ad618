#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rageval {

/// Sampling parameters sent with every generation call. Defaults are the
/// near-deterministic settings used for judging (temperature 0, top_p 0.01).
struct GenerationParams {
    double temperature = 0.0;
    double top_p = 0.01;
    int max_tokens = 1024;
    std::optional<std::int64_t> seed;

    /// Throws ConfigError when a field is out of range.
    void validate() const;
};

/// Text completion backend. Implementations must be safe for concurrent calls.
class TextGenerator {
public:
    virtual ~TextGenerator() = default;
    virtual std::string complete(std::string_view prompt, const GenerationParams& params) const = 0;
    virtual std::string identifier() const = 0;
};

/// Fixed-dimension text embedding backend.
class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::vector<double> embed(std::string_view text) const = 0;
    virtual std::size_t dimension() const = 0;
    virtual std::string identifier() const = 0;
};

/// Scores a (query, candidate) pair jointly and returns a relevance logit.
class PairScorer {
public:
    virtual ~PairScorer() = default;
    virtual double score(std::string_view query, std::string_view candidate) const = 0;
    virtual std::string identifier() const = 0;
};

/// The three backends an evaluation run talks to. Any of them may be null
/// when the run does not need it.
struct Providers {
    std::shared_ptr<const TextGenerator> generator;
    std::shared_ptr<const Embedder> embedder;
    std::shared_ptr<const PairScorer> scorer;
};

// ---------------------------------------------------------------------------
// Deterministic in-process stubs
// ---------------------------------------------------------------------------

/// A prompt matches a rule when it contains every string in `contains`.
/// With several responses the call's seed picks one (seed mod count; no seed
/// picks the first), so repeated calls stay stateless.
struct ScriptRule {
    std::vector<std::string> contains;
    std::vector<std::string> responses;
};

struct ScriptOptions {
    bool strict = true;         // unmatched prompt throws instead of returning `fallback`
    std::string fallback;
    std::string name = "scripted";
};

/// First matching rule wins. Unmatched prompts throw ProviderError naming
/// the first 60 bytes of the prompt when `strict`.
std::shared_ptr<const TextGenerator> scripted_generator(std::vector<ScriptRule> rules,
                                                        ScriptOptions options = {});

inline constexpr double kDefaultKeywordBoost = 4.0;

/// Signed feature-hashing embedder. Each lower-cased alphanumeric token (bytes
/// of non-ASCII characters count as word characters) adds
/// ±1 on axis fnv1a64(token) mod dimension (sign from the top hash bit); a
/// token listed in `keyword_channels` also adds `keyword_boost` on its
/// channel axis. The sum is L2-normalised; text without tokens maps to the
/// zero vector. Throws ConfigError for dimension 0 or an axis out of range.
std::shared_ptr<const Embedder> hash_embedder(std::size_t dimension,
                                              std::map<std::string, std::size_t> keyword_channels = {},
                                              double keyword_boost = kDefaultKeywordBoost);

/// Reads the four rendered score statements from an enhanced answer and
/// returns bias + Σ wᵢ·scoreᵢ. Weight order: faithfulness, answer relevance,
/// retrieval recall, retrieval precision. A missing statement throws
/// ProviderError naming the metric.
std::shared_ptr<const PairScorer> linear_pair_scorer(std::array<double, 4> weights, double bias);

}  // namespace rageval
