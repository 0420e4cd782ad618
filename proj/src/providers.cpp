#include "rageval/providers.hpp"

#include <cctype>
#include <cmath>
#include <exception>

#include "rageval/aggregation.hpp"
#include "rageval/error.hpp"
#include "rageval/text.hpp"

namespace rageval {

void GenerationParams::validate() const {
    if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
        throw ConfigError("temperature must be a finite value >= 0");
    }
    if (!(top_p > 0.0 && top_p <= 1.0)) {
        throw ConfigError("top_p must lie in (0, 1]");
    }
    if (max_tokens <= 0) {
        throw ConfigError("max_tokens must be positive");
    }
}

namespace {

class ScriptedGenerator final : public TextGenerator {
public:
    ScriptedGenerator(std::vector<ScriptRule> rules, ScriptOptions options)
        : rules_(std::move(rules)), options_(std::move(options)) {
        for (const auto& rule : rules_) {
            if (rule.responses.empty()) {
                throw ConfigError("scripted rule without responses");
            }
        }
    }

    std::string complete(std::string_view prompt, const GenerationParams& params) const override {
        for (const auto& rule : rules_) {
            const bool match = std::all_of(rule.contains.begin(), rule.contains.end(), [&](const std::string& needle) {
                return prompt.find(needle) != std::string_view::npos;
            });
            if (!match) {
                continue;
            }
            std::size_t pick = 0;
            if (params.seed) {
                const auto k = static_cast<std::int64_t>(rule.responses.size());
                pick = static_cast<std::size_t>(((*params.seed % k) + k) % k);
            }
            return rule.responses[pick];
        }
        if (!options_.strict) {
            return options_.fallback;
        }
        std::string head(prompt.substr(0, 60));
        for (auto& c : head) {
            if (c == '\n') {
                c = ' ';
            }
        }
        throw ProviderError("scripted generator has no rule for prompt starting '" + head + "'");
    }

    std::string identifier() const override { return options_.name; }

private:
    std::vector<ScriptRule> rules_;
    ScriptOptions options_;
};

class HashEmbedder final : public Embedder {
public:
    HashEmbedder(std::size_t dimension, std::map<std::string, std::size_t> keywords, double boost)
        : dimension_(dimension), keywords_(std::move(keywords)), boost_(boost) {
        if (dimension_ == 0) {
            throw ConfigError("hash embedder dimension must be positive");
        }
        for (const auto& [word, axis] : keywords_) {
            if (axis >= dimension_) {
                throw ConfigError("keyword channel '" + word + "' axis " + std::to_string(axis) +
                                  " is outside dimension " + std::to_string(dimension_));
            }
        }
        if (!std::isfinite(boost_)) {
            throw ConfigError("keyword boost must be finite");
        }
    }

    std::vector<double> embed(std::string_view input) const override {
        std::vector<double> v(dimension_, 0.0);
        std::string token;
        auto flush = [&] {
            if (token.empty()) {
                return;
            }
            const auto h = text::fnv1a64(token);
            v[h % dimension_] += (h >> 63) != 0 ? -1.0 : 1.0;
            if (const auto it = keywords_.find(token); it != keywords_.end()) {
                v[it->second] += boost_;
            }
            token.clear();
        };
        for (const char c : input) {
            const auto u = static_cast<unsigned char>(c);
            if (std::isalnum(u) != 0 || u >= 0x80) {
                token.push_back(static_cast<char>(std::tolower(u)));
            } else {
                flush();
            }
        }
        flush();

        double norm = 0.0;
        for (const double x : v) {
            norm += x * x;
        }
        if (norm > 0.0) {
            norm = std::sqrt(norm);
            for (double& x : v) {
                x /= norm;
            }
        }
        return v;
    }

    std::size_t dimension() const override { return dimension_; }

    std::string identifier() const override { return "hash-" + std::to_string(dimension_); }

private:
    std::size_t dimension_;
    std::map<std::string, std::size_t> keywords_;
    double boost_;
};

class LinearPairScorer final : public PairScorer {
public:
    LinearPairScorer(std::array<double, 4> weights, double bias) : weights_(weights), bias_(bias) {}

    double score(std::string_view, std::string_view candidate) const override {
        MetricScores s;
        try {
            s = read_rendered_scores(candidate);
        } catch (const AggregationError& e) {
            throw ProviderError(std::string("linear pair scorer: ") + e.what());
        }
        return bias_ + weights_[0] * s.faithfulness + weights_[1] * s.answer_relevance +
               weights_[2] * s.retrieval_recall + weights_[3] * s.retrieval_precision;
    }

    std::string identifier() const override { return "linear"; }

private:
    std::array<double, 4> weights_;
    double bias_;
};

}  // namespace

std::shared_ptr<const TextGenerator> scripted_generator(std::vector<ScriptRule> rules, ScriptOptions options) {
    return std::make_shared<ScriptedGenerator>(std::move(rules), std::move(options));
}

std::shared_ptr<const Embedder> hash_embedder(std::size_t dimension, std::map<std::string, std::size_t> keyword_channels,
                                              double keyword_boost) {
    return std::make_shared<HashEmbedder>(dimension, std::move(keyword_channels), keyword_boost);
}

std::shared_ptr<const PairScorer> linear_pair_scorer(std::array<double, 4> weights, double bias) {
    return std::make_shared<LinearPairScorer>(weights, bias);
}

}  // namespace rageval
