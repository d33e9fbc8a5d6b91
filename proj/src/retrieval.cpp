#include "glean/retrieval.hpp"

#include <algorithm>
#include <iterator>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "glean/error.hpp"
#include "glean/rng.hpp"
#include "http_client.hpp"

namespace glean {

namespace {

constexpr std::string_view kStopwords[] = {
    "a",     "about", "after", "against", "all",    "also",  "an",    "and",   "any",   "are",   "as",
    "at",    "be",    "been",  "being",   "both",   "but",   "by",    "can",   "could", "did",   "do",
    "does",  "due",   "during", "each",   "either", "for",   "from",  "had",   "has",   "have",  "he",
    "her",   "his",   "if",    "in",      "into",   "is",    "it",    "its",   "may",   "more",  "most",
    "of",    "on",    "or",    "other",   "over",   "she",   "such",  "than",  "that",  "the",   "their",
    "then",  "there", "these", "this",    "those",  "to",    "was",   "were",  "with"};

}  // namespace

bool is_stopword(std::string_view token) {
    return std::find(std::begin(kStopwords), std::end(kStopwords), token) != std::end(kStopwords);
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            cur += static_cast<char>(std::tolower(c));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::vector<std::string> extract_query_terms(std::string_view answer) {
    std::vector<std::string> out;
    for (auto& tok : tokenize(answer)) {
        if (is_stopword(tok)) continue;
        if (std::find(out.begin(), out.end(), tok) == out.end()) out.push_back(std::move(tok));
    }
    if (out.empty()) throw data_error("unretrievable answer: '" + std::string(answer) + "' has no query terms");
    return out;
}

std::vector<double> HashedEmbedder::embed(std::string_view text) const {
    std::vector<double> v(dim_, 0.0);
    for (const auto& tok : tokenize(text)) {
        const std::uint64_t h = mix64(fnv1a(tok) ^ seed_);
        v[h % dim_] += (h >> 63) ? -1.0 : 1.0;
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    if (norm > 0.0) {
        norm = std::sqrt(norm);
        for (double& x : v) x /= norm;
    }
    return v;
}

RemoteEmbedder::RemoteEmbedder(EmbedderConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.endpoint.empty()) throw data_error("remote embedder requires an endpoint");
}

std::vector<double> RemoteEmbedder::embed(std::string_view text) const {
    const nlohmann::json body = {{"model", cfg_.model_name}, {"input", std::string(text)}};
    const auto response = detail::post_json(
        cfg_.endpoint, "/embeddings", body,
        detail::HttpOptions{cfg_.api_key, cfg_.timeout_ms, cfg_.max_retries, cfg_.initial_backoff_ms});
    try {
        return response.at("data").at(0).at("embedding").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw remote_error(std::string("embedding response malformed: ") + e.what());
    }
}

std::shared_ptr<const Embedder> make_embedder(EmbedderConfig cfg) {
    if (cfg.endpoint.empty())
        if (const char* v = std::getenv("GLEAN_EMBED_ENDPOINT")) cfg.endpoint = v;
    if (cfg.api_key.empty())
        if (const char* v = std::getenv("GLEAN_EMBED_API_KEY")) cfg.api_key = v;
    if (cfg.endpoint.empty()) return std::make_shared<HashedEmbedder>(cfg.hashed_dim, cfg.hashed_seed);
    return std::make_shared<RemoteEmbedder>(std::move(cfg));
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw data_error("embedding dimensions differ");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

GuidelineStore::GuidelineStore(std::vector<Guideline> guidelines, std::shared_ptr<const Embedder> embedder,
                               TermExtractor extractor)
    : guidelines_(std::move(guidelines)), embedder_(std::move(embedder)), extractor_(std::move(extractor)) {
    if (!embedder_) embedder_ = std::make_shared<HashedEmbedder>();
    terms_.resize(guidelines_.size());
    embeddings_.resize(guidelines_.size());
    for (std::size_t i = 0; i < guidelines_.size(); ++i) {
        const auto& g = guidelines_[i];
        validate(g);
        if (!by_id_.emplace(g.id, i).second) throw data_error("duplicate guideline id " + g.id);
        for (auto& tok : tokenize(g.title))
            if (!is_stopword(tok)) terms_[i].insert(std::move(tok));
        for (const auto& kw : g.keywords)
            for (auto& tok : tokenize(kw))
                if (!is_stopword(tok)) terms_[i].insert(std::move(tok));
        for (const auto& term : terms_[i]) keyword_index_[term].push_back(g.id);
        std::string text = g.title;
        if (g.abstract && !g.abstract->empty()) text += "\n" + *g.abstract;
        embeddings_[i] = embedder_->embed(text);
    }
}

const Guideline& GuidelineStore::get(const std::string& id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) throw data_error("unknown guideline id " + id);
    return guidelines_[it->second];
}

std::vector<std::string> GuidelineStore::query_terms(std::string_view answer) const {
    if (!extractor_) return extract_query_terms(answer);
    auto terms = extractor_(answer);
    if (terms.empty()) throw data_error("unretrievable answer: '" + std::string(answer) + "' has no query terms");
    return terms;
}

namespace {

RetrievalResult rank_all(const GuidelineStore& store, std::string_view answer) {
    if (store.size() == 0) throw data_error("guideline store is empty");
    const auto terms = store.query_terms(answer);
    std::map<std::string, int> hits;
    const auto& index = store.keyword_index();
    for (const auto& term : terms)
        if (auto it = index.find(term); it != index.end())
            for (const auto& id : it->second) ++hits[id];
    if (hits.empty()) throw data_error("no relevant guideline for answer '" + std::string(answer) + "'");

    const auto query = store.embedder().embed(answer);
    struct Row {
        std::string id;
        int count;
        double sim;
    };
    std::vector<Row> rows;
    rows.reserve(hits.size());
    for (const auto& [id, count] : hits)
        rows.push_back({id, count, cosine_similarity(query, store.embedding_of(store.index_of(id)))});
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.count != b.count) return a.count > b.count;
        if (a.sim != b.sim) return a.sim > b.sim;
        return a.id < b.id;
    });
    RetrievalResult out;
    for (auto& r : rows) {
        out.ranked_ids.push_back(std::move(r.id));
        out.match_counts.push_back(r.count);
        out.rerank_scores.push_back(r.sim);
    }
    return out;
}

}  // namespace

RetrievalResult retrieve(const GuidelineStore& store, std::string_view answer, std::size_t k) {
    if (k < 1) throw data_error("retrieve requires k >= 1");
    auto out = rank_all(store, answer);
    if (out.size() > k) {
        out.ranked_ids.resize(k);
        out.match_counts.resize(k);
        out.rerank_scores.resize(k);
    }
    return out;
}

std::vector<Guideline> expand(const GuidelineStore& store, std::string_view answer,
                              const std::set<std::string>& already_used, std::size_t n_extra) {
    if (n_extra < 1) throw data_error("expand requires n_extra >= 1");
    std::vector<Guideline> out;
    RetrievalResult ranking;
    try {
        ranking = rank_all(store, answer);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::data) return out;
        throw;
    }
    for (const auto& id : ranking.ranked_ids) {
        if (out.size() == n_extra) break;
        if (!already_used.contains(id)) out.push_back(store.get(id));
    }
    return out;
}

std::vector<Guideline> retrieve_competitive(const GuidelineStore& store, std::string_view answer,
                                            const std::vector<std::string>& candidate_answers, std::size_t n_comp,
                                            const std::set<std::string>& exclude, std::uint64_t seed) {
    if (n_comp < 1) throw data_error("retrieve_competitive requires n_comp >= 1");
    const auto own = store.query_terms(answer);
    const std::set<std::string> own_set(own.begin(), own.end());

    std::vector<std::string> pool;
    for (const auto& candidate : candidate_answers) {
        std::vector<std::string> terms;
        try {
            terms = store.query_terms(candidate);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::data) continue;
            throw;
        }
        if (std::set<std::string>(terms.begin(), terms.end()) == own_set) continue;
        RetrievalResult top;
        try {
            top = retrieve(store, candidate, 1);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::data) continue;
            throw;
        }
        const auto& id = top.ranked_ids.front();
        if (exclude.contains(id)) continue;
        if (std::find(pool.begin(), pool.end(), id) == pool.end()) pool.push_back(id);
    }

    if (pool.size() > n_comp) {
        Rng rng(seed);
        for (std::size_t i = 0; i < n_comp; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(n_comp);
    }
    std::vector<Guideline> out;
    out.reserve(pool.size());
    for (const auto& id : pool) out.push_back(store.get(id));
    return out;
}

}  // namespace glean
