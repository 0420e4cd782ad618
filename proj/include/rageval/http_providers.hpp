#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>

#include "rageval/providers.hpp"

namespace rageval {

struct RetryPolicy {
    int attempts = 3;
    std::chrono::milliseconds base_delay{250};
    std::uint64_t jitter_seed = 0;
};

/// Where and how to reach one hosted model.
struct HttpEndpoint {
    std::string url;       // scheme://host[:port]/path
    std::string model;
    std::string auth_env;  // name of the environment variable holding the token; empty = no auth
    std::string auth_header = "Authorization";
    std::string auth_scheme = "Bearer";
    std::string response_path;  // JSON pointer into the response body; empty = dialect default
    std::chrono::milliseconds timeout{60000};
    RetryPolicy retry;
    std::size_t max_in_flight = 4;
};

enum class GeneratorDialect {
    Messages,  // {model, messages:[{role:"user", content}], temperature, top_p, max_tokens} -> /content/0/text
    Prompt,    // {model, prompt, temperature, top_p, max_tokens} -> /completion
};

/// Default response pointers per wire format.
inline constexpr const char* kMessagesResponsePath = "/content/0/text";
inline constexpr const char* kPromptResponsePath = "/completion";
inline constexpr const char* kEmbeddingResponsePath = "/embedding";
inline constexpr const char* kLogitResponsePath = "/logit";

/// Transient failures (transport errors, 429, 5xx) are retried up to
/// `retry.attempts` times with jittered doubling delays, then TimeoutError.
/// 401/403 throw AuthError immediately, other 4xx ProviderError; a body
/// without the configured field throws ResponseFormatError.
std::shared_ptr<const TextGenerator> http_generator(HttpEndpoint endpoint,
                                                    GeneratorDialect dialect = GeneratorDialect::Messages);
std::shared_ptr<const Embedder> http_embedder(HttpEndpoint endpoint);
std::shared_ptr<const PairScorer> http_pair_scorer(HttpEndpoint endpoint);

}  // namespace rageval
