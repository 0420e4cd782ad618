#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rageval/http_providers.hpp"
#include "rageval/metrics.hpp"
#include "rageval/providers.hpp"
#include "rageval/stats.hpp"

namespace rageval {

enum class ProviderKind { Stub, Http };

struct StubConfig {
    std::vector<ScriptRule> rules;
    bool strict = true;
    std::string fallback;
    std::size_t embedding_dimension = 256;
    std::map<std::string, std::size_t> keyword_channels;
    double keyword_boost = kDefaultKeywordBoost;
    std::array<double, 4> scorer_weights{1.0, 1.0, 1.0, 1.0};  // faithfulness, relevance, recall, precision
    double scorer_bias = 0.0;
};

struct HttpConfig {
    std::optional<HttpEndpoint> generator;
    GeneratorDialect dialect = GeneratorDialect::Messages;
    std::optional<HttpEndpoint> embedder;
    std::optional<HttpEndpoint> scorer;
};

/// Everything a command needs besides its input files. Defaults follow the
/// deterministic judge settings (temperature 0, top_p 0.01) and a 95% CI.
struct RunConfig {
    ProviderKind providers = ProviderKind::Stub;
    std::uint64_t seed = 0;
    std::size_t parallelism = 4;
    GenerationParams generation;
    SimilarityConfig similarity;
    RecallSource recall_source = RecallSource::Auto;
    StatementStrategy statements = StatementStrategy::Sentences;
    bool contexts_included = true;
    bool strict_parsing = true;  // malformed input rows abort the run instead of being skipped
    stats::BootstrapConfig bootstrap;
    std::vector<std::size_t> checkpoints{500, 1000, 2000, 4000};
    double min_effect = 0.1;
    StubConfig stub;
    HttpConfig http;

    /// Judge settings with the run seed applied.
    EvalConfig eval_config() const;
    stats::BootstrapConfig bootstrap_config() const;
};

/// Throws ConfigError on unknown keys, wrong types or invalid values.
/// A run manifest is accepted too; its "config" member is used.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& path);

/// Every field, defaults included. HTTP endpoints carry the name of the
/// token variable only.
nlohmann::ordered_json run_config_json(const RunConfig& cfg);

/// Builds the provider triple the config selects.
Providers make_providers(const RunConfig& cfg);

std::string_view provider_kind_name(ProviderKind kind) noexcept;
std::optional<ProviderKind> provider_kind_from_name(std::string_view name) noexcept;

}  // namespace rageval
