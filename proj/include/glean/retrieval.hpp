#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "glean/core.hpp"

namespace glean {

// Text embedding provider. Implementations must be thread-safe.
class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::vector<double> embed(std::string_view text) const = 0;
};

// Signed feature hashing of lowercase word tokens, L2-normalised. Offline default.
class HashedEmbedder : public Embedder {
public:
    explicit HashedEmbedder(std::size_t dim = 256, std::uint64_t seed = 0) : dim_(dim), seed_(seed) {}
    std::vector<double> embed(std::string_view text) const override;

private:
    std::size_t dim_;
    std::uint64_t seed_;
};

struct EmbedderConfig {
    std::string endpoint;  // empty: fall back to GLEAN_EMBED_ENDPOINT, then to HashedEmbedder
    std::string model_name;
    std::string api_key;
    int timeout_ms = 30000;
    int max_retries = 3;
    int initial_backoff_ms = 250;
    std::size_t hashed_dim = 256;
    std::uint64_t hashed_seed = 0;
};

// OpenAI-compatible /embeddings client.
class RemoteEmbedder : public Embedder {
public:
    explicit RemoteEmbedder(EmbedderConfig cfg);
    std::vector<double> embed(std::string_view text) const override;

private:
    EmbedderConfig cfg_;
};

std::shared_ptr<const Embedder> make_embedder(EmbedderConfig cfg);

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

// Lowercase alphanumeric runs; every other character separates tokens.
std::vector<std::string> tokenize(std::string_view text);

bool is_stopword(std::string_view token);

// Tokenize, drop stopwords, de-duplicate keeping first occurrence.
// Throws data error "unretrievable answer" when nothing remains.
std::vector<std::string> extract_query_terms(std::string_view answer);

// Hook for replacing the built-in extractor, e.g. with an LLM-backed one.
using TermExtractor = std::function<std::vector<std::string>(std::string_view)>;

class GuidelineStore {
public:
    GuidelineStore(std::vector<Guideline> guidelines, std::shared_ptr<const Embedder> embedder,
                   TermExtractor extractor = {});

    const std::vector<Guideline>& guidelines() const { return guidelines_; }
    const Guideline& get(const std::string& id) const;
    bool contains(const std::string& id) const { return by_id_.contains(id); }
    std::size_t size() const { return guidelines_.size(); }

    const std::map<std::string, std::vector<std::string>>& keyword_index() const { return keyword_index_; }
    const Embedder& embedder() const { return *embedder_; }

    std::vector<std::string> query_terms(std::string_view answer) const;

    // Index of guideline terms (title tokens minus stopwords, plus keywords).
    const std::set<std::string>& terms_of(std::size_t index) const { return terms_[index]; }
    const std::vector<double>& embedding_of(std::size_t index) const { return embeddings_[index]; }
    std::size_t index_of(const std::string& id) const { return by_id_.at(id); }

private:
    std::vector<Guideline> guidelines_;
    std::shared_ptr<const Embedder> embedder_;
    TermExtractor extractor_;
    std::map<std::string, std::size_t> by_id_;
    std::map<std::string, std::vector<std::string>> keyword_index_;
    std::vector<std::set<std::string>> terms_;
    std::vector<std::vector<double>> embeddings_;
};

struct RetrievalResult {
    std::vector<std::string> ranked_ids;
    std::vector<int> match_counts;
    std::vector<double> rerank_scores;

    std::size_t size() const { return ranked_ids.size(); }
};

// Guidelines with at least one title/keyword hit, ranked by
// (match count desc, cosine(answer, title+abstract) desc, id asc), top k.
// Throws data error "no relevant guideline" when nothing matches.
RetrievalResult retrieve(const GuidelineStore& store, std::string_view answer, std::size_t k);

// Next n_extra guidelines in retrieve order that are not in already_used.
std::vector<Guideline> expand(const GuidelineStore& store, std::string_view answer,
                              const std::set<std::string>& already_used, std::size_t n_extra);

// Top guideline for each alternative answer whose terms differ from the
// verified answer's, minus `exclude`, then up to n_comp drawn uniformly
// without replacement using `seed`.
std::vector<Guideline> retrieve_competitive(const GuidelineStore& store, std::string_view answer,
                                            const std::vector<std::string>& candidate_answers, std::size_t n_comp,
                                            const std::set<std::string>& exclude, std::uint64_t seed);

}  // namespace glean
