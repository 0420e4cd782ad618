#include "rageval/config.hpp"

#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>

#include "rageval/error.hpp"

namespace rageval {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

void allow_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> keys) {
    if (!obj.is_object()) {
        throw ConfigError(std::string(where) + " must be an object");
    }
    const std::set<std::string_view> allowed(keys);
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.contains(key)) {
            throw ConfigError("unknown config key '" + std::string(where) + "." + key + "'");
        }
    }
}

std::string field(std::string_view where, std::string_view key) { return std::string(where) + "." + std::string(key); }

template <class T>
void read(const json& obj, std::string_view where, std::string_view key, T& out);

template <>
void read(const json& obj, std::string_view where, std::string_view key, bool& out) {
    if (const auto it = obj.find(key); it != obj.end()) {
        if (!it->is_boolean()) {
            throw ConfigError(field(where, key) + " must be a boolean");
        }
        out = it->get<bool>();
    }
}

template <>
void read(const json& obj, std::string_view where, std::string_view key, double& out) {
    if (const auto it = obj.find(key); it != obj.end()) {
        if (!it->is_number()) {
            throw ConfigError(field(where, key) + " must be a number");
        }
        out = it->get<double>();
    }
}

template <>
void read(const json& obj, std::string_view where, std::string_view key, std::string& out) {
    if (const auto it = obj.find(key); it != obj.end()) {
        if (!it->is_string()) {
            throw ConfigError(field(where, key) + " must be a string");
        }
        out = it->get<std::string>();
    }
}

// Programmatic documents hold small integers as signed values.
bool is_count(const json& v) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

template <>
void read(const json& obj, std::string_view where, std::string_view key, std::size_t& out) {
    if (const auto it = obj.find(key); it != obj.end()) {
        if (!is_count(*it)) {
            throw ConfigError(field(where, key) + " must be a non-negative integer");
        }
        out = it->get<std::size_t>();
    }
}

template <>
void read(const json& obj, std::string_view where, std::string_view key, int& out) {
    if (const auto it = obj.find(key); it != obj.end()) {
        if (!it->is_number_integer() || it->get<std::int64_t>() < std::numeric_limits<int>::min() ||
            it->get<std::int64_t>() > std::numeric_limits<int>::max()) {
            throw ConfigError(field(where, key) + " must be an integer");
        }
        out = it->get<int>();
    }
}

std::vector<std::string> read_strings(const json& value, const std::string& where) {
    if (!value.is_array()) {
        throw ConfigError(where + " must be an array of strings");
    }
    std::vector<std::string> out;
    for (const auto& s : value) {
        if (!s.is_string()) {
            throw ConfigError(where + " must be an array of strings");
        }
        out.push_back(s.get<std::string>());
    }
    return out;
}

HttpEndpoint read_endpoint(const json& obj, const std::string& where, bool with_dialect) {
    if (with_dialect) {
        allow_keys(obj, where,
                   {"url", "model", "auth_env", "auth_header", "auth_scheme", "response_path", "timeout_ms", "retry",
                    "max_in_flight", "dialect"});
    } else {
        allow_keys(obj, where,
                   {"url", "model", "auth_env", "auth_header", "auth_scheme", "response_path", "timeout_ms", "retry",
                    "max_in_flight"});
    }
    HttpEndpoint e;
    read(obj, where, "url", e.url);
    if (e.url.empty()) {
        throw ConfigError(where + ".url is required");
    }
    read(obj, where, "model", e.model);
    read(obj, where, "auth_env", e.auth_env);
    read(obj, where, "auth_header", e.auth_header);
    read(obj, where, "auth_scheme", e.auth_scheme);
    read(obj, where, "response_path", e.response_path);
    std::size_t timeout_ms = static_cast<std::size_t>(e.timeout.count());
    read(obj, where, "timeout_ms", timeout_ms);
    e.timeout = std::chrono::milliseconds(timeout_ms);
    read(obj, where, "max_in_flight", e.max_in_flight);
    if (e.max_in_flight == 0) {
        throw ConfigError(where + ".max_in_flight must be positive");
    }
    if (const auto it = obj.find("retry"); it != obj.end()) {
        const auto rw = where + ".retry";
        allow_keys(*it, rw, {"attempts", "base_delay_ms", "jitter_seed"});
        read(*it, rw, "attempts", e.retry.attempts);
        if (e.retry.attempts < 1) {
            throw ConfigError(rw + ".attempts must be at least 1");
        }
        std::size_t delay = static_cast<std::size_t>(e.retry.base_delay.count());
        read(*it, rw, "base_delay_ms", delay);
        e.retry.base_delay = std::chrono::milliseconds(delay);
        read(*it, rw, "jitter_seed", e.retry.jitter_seed);
    }
    return e;
}

ojson endpoint_json(const HttpEndpoint& e) {
    return ojson{{"url", e.url},
                 {"model", e.model},
                 {"auth_env", e.auth_env},
                 {"auth_header", e.auth_header},
                 {"auth_scheme", e.auth_scheme},
                 {"response_path", e.response_path},
                 {"timeout_ms", e.timeout.count()},
                 {"retry",
                  {{"attempts", e.retry.attempts},
                   {"base_delay_ms", e.retry.base_delay.count()},
                   {"jitter_seed", e.retry.jitter_seed}}},
                 {"max_in_flight", e.max_in_flight}};
}

std::string_view recall_source_name(RecallSource s) {
    switch (s) {
        case RecallSource::Auto: return "auto";
        case RecallSource::GroundTruth: return "ground_truth";
        case RecallSource::Answer: return "answer";
    }
    return "auto";
}

std::string_view statement_strategy_name(StatementStrategy s) {
    return s == StatementStrategy::Sentences ? "sentences" : "whole_answer";
}

void read_stub(const json& obj, StubConfig& stub) {
    allow_keys(obj, "stub", {"generator", "embedder", "scorer"});
    if (const auto g = obj.find("generator"); g != obj.end()) {
        allow_keys(*g, "stub.generator", {"strict", "fallback", "rules"});
        read(*g, "stub.generator", "strict", stub.strict);
        read(*g, "stub.generator", "fallback", stub.fallback);
        if (const auto rules = g->find("rules"); rules != g->end()) {
            if (!rules->is_array()) {
                throw ConfigError("stub.generator.rules must be an array");
            }
            for (std::size_t i = 0; i < rules->size(); ++i) {
                const auto where = "stub.generator.rules[" + std::to_string(i) + "]";
                const auto& r = (*rules)[i];
                allow_keys(r, where, {"contains", "responses"});
                ScriptRule rule;
                if (r.contains("contains")) {
                    rule.contains = read_strings(r["contains"], where + ".contains");
                }
                if (!r.contains("responses")) {
                    throw ConfigError(where + ".responses is required");
                }
                rule.responses = read_strings(r["responses"], where + ".responses");
                if (rule.responses.empty()) {
                    throw ConfigError(where + ".responses must not be empty");
                }
                stub.rules.push_back(std::move(rule));
            }
        }
    }
    if (const auto e = obj.find("embedder"); e != obj.end()) {
        allow_keys(*e, "stub.embedder", {"dimension", "keyword_channels", "keyword_boost"});
        read(*e, "stub.embedder", "dimension", stub.embedding_dimension);
        read(*e, "stub.embedder", "keyword_boost", stub.keyword_boost);
        if (const auto k = e->find("keyword_channels"); k != e->end()) {
            if (!k->is_object()) {
                throw ConfigError("stub.embedder.keyword_channels must map words to axes");
            }
            for (const auto& [word, axis] : k->items()) {
                if (!is_count(axis)) {
                    throw ConfigError("stub.embedder.keyword_channels." + word + " must be a non-negative integer");
                }
                stub.keyword_channels[word] = axis.get<std::size_t>();
            }
        }
    }
    if (const auto s = obj.find("scorer"); s != obj.end()) {
        allow_keys(*s, "stub.scorer", {"weights", "bias"});
        read(*s, "stub.scorer", "bias", stub.scorer_bias);
        if (const auto w = s->find("weights"); w != s->end()) {
            allow_keys(*w, "stub.scorer.weights",
                       {"faithfulness", "answer_relevance", "retrieval_recall", "retrieval_precision"});
            for (std::size_t i = 0; i < kAllMetrics.size(); ++i) {
                read(*w, "stub.scorer.weights", metric_name(kAllMetrics[i]), stub.scorer_weights[i]);
            }
        }
    }
}

}  // namespace

std::string_view provider_kind_name(ProviderKind kind) noexcept {
    return kind == ProviderKind::Stub ? "stub" : "http";
}

std::optional<ProviderKind> provider_kind_from_name(std::string_view name) noexcept {
    if (name == "stub") {
        return ProviderKind::Stub;
    }
    if (name == "http") {
        return ProviderKind::Http;
    }
    return std::nullopt;
}

EvalConfig RunConfig::eval_config() const {
    EvalConfig out;
    out.similarity = similarity;
    out.generation = generation;
    out.generation.seed = static_cast<std::int64_t>(seed);
    out.recall_source = recall_source;
    out.statements = statements;
    out.parallelism = parallelism;
    return out;
}

stats::BootstrapConfig RunConfig::bootstrap_config() const {
    auto out = bootstrap;
    out.seed = seed;
    return out;
}

RunConfig parse_run_config(const json& doc) {
    if (doc.is_object() && doc.contains("manifest_version")) {
        if (!doc.contains("config")) {
            throw ConfigError("manifest has no config member");
        }
        return parse_run_config(doc["config"]);
    }
    allow_keys(doc, "config",
               {"providers", "seed", "parallelism", "generation", "similarity", "recall_source", "statements",
                "contexts_included", "strict_parsing", "bootstrap", "topicality", "stub", "http"});

    RunConfig cfg;
    if (const auto it = doc.find("providers"); it != doc.end()) {
        const auto kind = it->is_string() ? provider_kind_from_name(it->get<std::string>()) : std::nullopt;
        if (!kind) {
            throw ConfigError("config.providers must be \"stub\" or \"http\"");
        }
        cfg.providers = *kind;
    }
    read(doc, "config", "seed", cfg.seed);
    read(doc, "config", "parallelism", cfg.parallelism);
    if (cfg.parallelism == 0) {
        throw ConfigError("config.parallelism must be positive");
    }
    read(doc, "config", "contexts_included", cfg.contexts_included);
    read(doc, "config", "strict_parsing", cfg.strict_parsing);

    if (const auto g = doc.find("generation"); g != doc.end()) {
        allow_keys(*g, "generation", {"temperature", "top_p", "max_tokens"});
        read(*g, "generation", "temperature", cfg.generation.temperature);
        read(*g, "generation", "top_p", cfg.generation.top_p);
        read(*g, "generation", "max_tokens", cfg.generation.max_tokens);
    }
    cfg.generation.validate();

    if (const auto s = doc.find("similarity"); s != doc.end()) {
        allow_keys(*s, "similarity", {"precision_match_threshold", "n_generated_questions"});
        read(*s, "similarity", "precision_match_threshold", cfg.similarity.precision_match_threshold);
        read(*s, "similarity", "n_generated_questions", cfg.similarity.n_generated_questions);
    }
    cfg.similarity.validate();

    if (const auto r = doc.find("recall_source"); r != doc.end()) {
        const auto name = r->is_string() ? r->get<std::string>() : std::string();
        if (name == "auto") {
            cfg.recall_source = RecallSource::Auto;
        } else if (name == "ground_truth") {
            cfg.recall_source = RecallSource::GroundTruth;
        } else if (name == "answer") {
            cfg.recall_source = RecallSource::Answer;
        } else {
            throw ConfigError("config.recall_source must be \"auto\", \"ground_truth\" or \"answer\"");
        }
    }
    if (const auto s = doc.find("statements"); s != doc.end()) {
        const auto name = s->is_string() ? s->get<std::string>() : std::string();
        if (name == "sentences") {
            cfg.statements = StatementStrategy::Sentences;
        } else if (name == "whole_answer") {
            cfg.statements = StatementStrategy::WholeAnswer;
        } else {
            throw ConfigError("config.statements must be \"sentences\" or \"whole_answer\"");
        }
    }

    if (const auto b = doc.find("bootstrap"); b != doc.end()) {
        allow_keys(*b, "bootstrap", {"resamples", "resample_size", "ci_level", "checkpoints"});
        read(*b, "bootstrap", "resamples", cfg.bootstrap.resamples);
        read(*b, "bootstrap", "ci_level", cfg.bootstrap.ci_level);
        if (const auto rs = b->find("resample_size"); rs != b->end() && !rs->is_null()) {
            std::size_t size = 0;
            read(*b, "bootstrap", "resample_size", size);
            cfg.bootstrap.resample_size = size;
        }
        if (const auto cp = b->find("checkpoints"); cp != b->end()) {
            if (!cp->is_array()) {
                throw ConfigError("bootstrap.checkpoints must be an array of integers");
            }
            cfg.checkpoints.clear();
            for (const auto& x : *cp) {
                if (!is_count(x)) {
                    throw ConfigError("bootstrap.checkpoints must be an array of integers");
                }
                cfg.checkpoints.push_back(x.get<std::size_t>());
            }
        }
    }
    if (const auto t = doc.find("topicality"); t != doc.end()) {
        allow_keys(*t, "topicality", {"min_effect"});
        read(*t, "topicality", "min_effect", cfg.min_effect);
        if (!(cfg.min_effect >= 0.0)) {
            throw ConfigError("topicality.min_effect must be non-negative");
        }
    }
    if (const auto s = doc.find("stub"); s != doc.end()) {
        read_stub(*s, cfg.stub);
    }
    if (const auto h = doc.find("http"); h != doc.end()) {
        allow_keys(*h, "http", {"generator", "embedder", "scorer"});
        if (const auto g = h->find("generator"); g != h->end()) {
            cfg.http.generator = read_endpoint(*g, "http.generator", true);
            if (const auto d = g->find("dialect"); d != g->end()) {
                const auto name = d->is_string() ? d->get<std::string>() : std::string();
                if (name == "messages") {
                    cfg.http.dialect = GeneratorDialect::Messages;
                } else if (name == "prompt") {
                    cfg.http.dialect = GeneratorDialect::Prompt;
                } else {
                    throw ConfigError("http.generator.dialect must be \"messages\" or \"prompt\"");
                }
            }
        }
        if (const auto e = h->find("embedder"); e != h->end()) {
            cfg.http.embedder = read_endpoint(*e, "http.embedder", false);
        }
        if (const auto s = h->find("scorer"); s != h->end()) {
            cfg.http.scorer = read_endpoint(*s, "http.scorer", false);
        }
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_run_config(doc);
}

ojson run_config_json(const RunConfig& cfg) {
    ojson rules = ojson::array();
    for (const auto& r : cfg.stub.rules) {
        rules.push_back({{"contains", r.contains}, {"responses", r.responses}});
    }
    ojson channels = ojson::object();
    for (const auto& [word, axis] : cfg.stub.keyword_channels) {
        channels[word] = axis;
    }
    ojson weights = ojson::object();
    for (std::size_t i = 0; i < kAllMetrics.size(); ++i) {
        weights[std::string(metric_name(kAllMetrics[i]))] = cfg.stub.scorer_weights[i];
    }
    ojson checkpoints = ojson::array();
    for (const auto c : cfg.checkpoints) {
        checkpoints.push_back(c);
    }

    ojson http = ojson::object();
    if (cfg.http.generator) {
        http["generator"] = endpoint_json(*cfg.http.generator);
        http["generator"]["dialect"] = cfg.http.dialect == GeneratorDialect::Messages ? "messages" : "prompt";
    }
    if (cfg.http.embedder) {
        http["embedder"] = endpoint_json(*cfg.http.embedder);
    }
    if (cfg.http.scorer) {
        http["scorer"] = endpoint_json(*cfg.http.scorer);
    }

    return ojson{
        {"providers", provider_kind_name(cfg.providers)},
        {"seed", cfg.seed},
        {"parallelism", cfg.parallelism},
        {"generation",
         {{"temperature", cfg.generation.temperature},
          {"top_p", cfg.generation.top_p},
          {"max_tokens", cfg.generation.max_tokens}}},
        {"similarity",
         {{"precision_match_threshold", cfg.similarity.precision_match_threshold},
          {"n_generated_questions", cfg.similarity.n_generated_questions}}},
        {"recall_source", recall_source_name(cfg.recall_source)},
        {"statements", statement_strategy_name(cfg.statements)},
        {"contexts_included", cfg.contexts_included},
        {"strict_parsing", cfg.strict_parsing},
        {"bootstrap",
         {{"resamples", cfg.bootstrap.resamples},
          {"resample_size", cfg.bootstrap.resample_size ? ojson(*cfg.bootstrap.resample_size) : ojson(nullptr)},
          {"ci_level", cfg.bootstrap.ci_level},
          {"checkpoints", checkpoints}}},
        {"topicality", {{"min_effect", cfg.min_effect}}},
        {"stub",
         {{"generator", {{"strict", cfg.stub.strict}, {"fallback", cfg.stub.fallback}, {"rules", rules}}},
          {"embedder",
           {{"dimension", cfg.stub.embedding_dimension},
            {"keyword_channels", channels},
            {"keyword_boost", cfg.stub.keyword_boost}}},
          {"scorer", {{"weights", weights}, {"bias", cfg.stub.scorer_bias}}}}},
        {"http", http},
    };
}

Providers make_providers(const RunConfig& cfg) {
    Providers p;
    if (cfg.providers == ProviderKind::Stub) {
        p.generator = scripted_generator(cfg.stub.rules, ScriptOptions{cfg.stub.strict, cfg.stub.fallback, "scripted"});
        p.embedder = hash_embedder(cfg.stub.embedding_dimension, cfg.stub.keyword_channels, cfg.stub.keyword_boost);
        p.scorer = linear_pair_scorer(cfg.stub.scorer_weights, cfg.stub.scorer_bias);
        return p;
    }
    if (cfg.http.generator) {
        p.generator = http_generator(*cfg.http.generator, cfg.http.dialect);
    }
    if (cfg.http.embedder) {
        p.embedder = http_embedder(*cfg.http.embedder);
    }
    if (cfg.http.scorer) {
        p.scorer = http_pair_scorer(*cfg.http.scorer);
    }
    return p;
}

}  // namespace rageval
