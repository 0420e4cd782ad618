#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace rageval::templates {

struct Asset {
    std::string_view name;
    std::string_view body;
};

// Asset names (file stems under assets/templates).
inline constexpr std::string_view kFaithfulness = "faithfulness";
inline constexpr std::string_view kRecall = "recall";
inline constexpr std::string_view kPrecision = "precision";
inline constexpr std::string_view kQuestionGeneration = "question_generation";
inline constexpr std::string_view kEnhancedPreamble = "enhanced_preamble";
inline constexpr std::string_view kEnhancedContext = "enhanced_context";
inline constexpr std::string_view kStatementAnswerRelevancy = "statement_answer_relevancy";
inline constexpr std::string_view kStatementContextPrecision = "statement_context_precision";
inline constexpr std::string_view kStatementContextRecall = "statement_context_recall";
inline constexpr std::string_view kStatementFaithfulness = "statement_faithfulness";
inline constexpr std::string_view kSyntheticCloud = "synthetic_cloud";
inline constexpr std::string_view kSyntheticBasketball = "synthetic_basketball";
inline constexpr std::string_view kSyntheticRandom = "synthetic_random";

/// Body of a shipped template. Throws ConfigError for unknown names.
std::string_view get(std::string_view name);

std::vector<std::string_view> names();

namespace detail {
std::span<const Asset> embedded_assets() noexcept;
}

}  // namespace rageval::templates
