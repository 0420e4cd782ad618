#include "rageval/http_providers.hpp"

#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <thread>
#include <utility>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "rageval/aggregation.hpp"
#include "rageval/error.hpp"
#include "rageval/random.hpp"

namespace rageval {

namespace {

using json = nlohmann::json;

struct Target {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

Target split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("endpoint url '" + url + "' has no scheme");
    }
    const auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        throw ConfigError("endpoint url '" + url + "' must use http or https");
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, path_start), url.substr(path_start)};
}

class Gate {
public:
    explicit Gate(std::size_t limit) : limit_(limit == 0 ? 1 : limit) {}

    void acquire() {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [&] { return active_ < limit_; });
        ++active_;
    }

    void release() {
        {
            std::lock_guard lock(mutex_);
            --active_;
        }
        cv_.notify_one();
    }

private:
    std::size_t limit_;
    std::size_t active_ = 0;
    std::mutex mutex_;
    std::condition_variable cv_;
};

class Transport {
public:
    Transport(HttpEndpoint endpoint, std::string default_path)
        : endpoint_(std::move(endpoint)),
          target_(split_url(endpoint_.url)),
          pointer_(endpoint_.response_path.empty() ? std::move(default_path) : endpoint_.response_path),
          gate_(endpoint_.max_in_flight),
          jitter_(endpoint_.retry.jitter_seed) {
        if (endpoint_.retry.attempts < 1) {
            throw ConfigError("retry attempts must be at least 1");
        }
        if (!pointer_.empty() && pointer_.front() != '/') {
            throw ConfigError("response path '" + pointer_ + "' is not a JSON pointer");
        }
    }

    const HttpEndpoint& endpoint() const { return endpoint_; }

    // Posts `body` and returns the value at the response pointer.
    json post(const json& body) const {
        const auto payload = body.dump();
        httplib::Headers headers;
        if (!endpoint_.auth_env.empty()) {
            const char* token = std::getenv(endpoint_.auth_env.c_str());
            if (token == nullptr || *token == '\0') {
                throw AuthError("environment variable " + endpoint_.auth_env + " is not set");
            }
            const auto value = endpoint_.auth_scheme.empty() ? std::string(token)
                                                             : endpoint_.auth_scheme + " " + token;
            headers.emplace(endpoint_.auth_header, value);
        }

        std::string last_failure;
        for (int attempt = 1; attempt <= endpoint_.retry.attempts; ++attempt) {
            if (attempt > 1) {
                std::this_thread::sleep_for(backoff(attempt - 1));
            }
            httplib::Result result;
            {
                gate_.acquire();
                httplib::Client client(target_.origin);
                const auto secs = endpoint_.timeout.count() / 1000;
                const auto usecs = (endpoint_.timeout.count() % 1000) * 1000;
                client.set_connection_timeout(secs, usecs);
                client.set_read_timeout(secs, usecs);
                client.set_write_timeout(secs, usecs);
                result = client.Post(target_.path, headers, payload, "application/json");
                gate_.release();
            }
            if (!result) {
                last_failure = "transport error: " + httplib::to_string(result.error());
                continue;
            }
            const int status = result->status;
            if (status == 401 || status == 403) {
                throw AuthError(endpoint_.url + " rejected credentials (HTTP " + std::to_string(status) + ")");
            }
            if (status == 429 || status >= 500) {
                last_failure = "HTTP " + std::to_string(status);
                continue;
            }
            if (status < 200 || status >= 300) {
                throw ProviderError(endpoint_.url + " returned HTTP " + std::to_string(status), status,
                                    result->body);
            }
            return extract(result->body);
        }
        throw TimeoutError(endpoint_.url + " failed after " + std::to_string(endpoint_.retry.attempts) +
                           " attempts (" + last_failure + ")");
    }

private:
    std::chrono::milliseconds backoff(int retry) const {
        double u = 0.0;
        {
            std::lock_guard lock(jitter_mutex_);
            u = random::uniform_unit(jitter_);
        }
        const double base = static_cast<double>(endpoint_.retry.base_delay.count()) * static_cast<double>(1 << (retry - 1));
        return std::chrono::milliseconds(static_cast<long long>(base * (0.5 + u)));
    }

    json extract(const std::string& body) const {
        json parsed;
        try {
            parsed = json::parse(body);
        } catch (const json::exception&) {
            throw ResponseFormatError(endpoint_.url + " returned a body that is not JSON");
        }
        try {
            return parsed.at(json::json_pointer(pointer_));
        } catch (const json::exception&) {
            throw ResponseFormatError(endpoint_.url + " response has no field at " + pointer_);
        }
    }

    HttpEndpoint endpoint_;
    Target target_;
    std::string pointer_;
    mutable Gate gate_;
    mutable std::mutex jitter_mutex_;
    mutable random::Engine jitter_;
};

class HttpGenerator final : public TextGenerator {
public:
    HttpGenerator(HttpEndpoint endpoint, GeneratorDialect dialect)
        : transport_(std::move(endpoint),
                     dialect == GeneratorDialect::Messages ? kMessagesResponsePath : kPromptResponsePath),
          dialect_(dialect) {}

    std::string complete(std::string_view prompt, const GenerationParams& params) const override {
        params.validate();
        json body = {{"model", transport_.endpoint().model},
                     {"temperature", params.temperature},
                     {"top_p", params.top_p},
                     {"max_tokens", params.max_tokens}};
        if (dialect_ == GeneratorDialect::Messages) {
            body["messages"] = json::array({{{"role", "user"}, {"content", std::string(prompt)}}});
        } else {
            body["prompt"] = std::string(prompt);
        }
        if (params.seed) {
            body["seed"] = *params.seed;
        }
        const auto value = transport_.post(body);
        if (!value.is_string()) {
            throw ResponseFormatError(transport_.endpoint().url + " completion is not a string");
        }
        return value.get<std::string>();
    }

    std::string identifier() const override { return transport_.endpoint().model; }

private:
    Transport transport_;
    GeneratorDialect dialect_;
};

class HttpEmbedder final : public Embedder {
public:
    explicit HttpEmbedder(HttpEndpoint endpoint) : transport_(std::move(endpoint), kEmbeddingResponsePath) {}

    std::vector<double> embed(std::string_view input) const override {
        const auto value = transport_.post({{"model", transport_.endpoint().model}, {"input", std::string(input)}});
        if (!value.is_array()) {
            throw ResponseFormatError(transport_.endpoint().url + " embedding is not an array");
        }
        std::vector<double> out;
        out.reserve(value.size());
        for (const auto& x : value) {
            if (!x.is_number()) {
                throw ResponseFormatError(transport_.endpoint().url + " embedding has a non-numeric entry");
            }
            out.push_back(x.get<double>());
        }
        std::lock_guard lock(mutex_);
        if (dimension_ == 0) {
            dimension_ = out.size();
        } else if (out.size() != dimension_) {
            throw ResponseFormatError(transport_.endpoint().url + " embedding dimension changed from " +
                                      std::to_string(dimension_) + " to " + std::to_string(out.size()));
        }
        return out;
    }

    // Zero until the first response arrives.
    std::size_t dimension() const override {
        std::lock_guard lock(mutex_);
        return dimension_;
    }

    std::string identifier() const override { return transport_.endpoint().model; }

private:
    Transport transport_;
    mutable std::mutex mutex_;
    mutable std::size_t dimension_ = 0;
};

class HttpPairScorer final : public PairScorer {
public:
    explicit HttpPairScorer(HttpEndpoint endpoint) : transport_(std::move(endpoint), kLogitResponsePath) {}

    double score(std::string_view query, std::string_view candidate) const override {
        const auto value = transport_.post({{"model", transport_.endpoint().model},
                                            {"query", std::string(query)},
                                            {"candidate", std::string(candidate)}});
        if (!value.is_number()) {
            throw ResponseFormatError(transport_.endpoint().url + " logit is not a number");
        }
        return value.get<double>();
    }

    std::string identifier() const override {
        return transport_.endpoint().model.empty() ? std::string(kDefaultScorerModel) : transport_.endpoint().model;
    }

private:
    Transport transport_;
};

}  // namespace

std::shared_ptr<const TextGenerator> http_generator(HttpEndpoint endpoint, GeneratorDialect dialect) {
    return std::make_shared<HttpGenerator>(std::move(endpoint), dialect);
}

std::shared_ptr<const Embedder> http_embedder(HttpEndpoint endpoint) {
    return std::make_shared<HttpEmbedder>(std::move(endpoint));
}

std::shared_ptr<const PairScorer> http_pair_scorer(HttpEndpoint endpoint) {
    return std::make_shared<HttpPairScorer>(std::move(endpoint));
}

}  // namespace rageval
