#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "commsense/corpus.hpp"
#include "commsense/providers.hpp"

namespace commsense {

struct EmbeddingMatrix {
    std::size_t dim = 0;
    std::vector<Vector> rows;  // one per comment, corpus order

    std::span<const double> row(std::size_t i) const { return rows.at(i); }
    std::size_t size() const noexcept { return rows.size(); }
    bool operator==(const EmbeddingMatrix&) const = default;
};

// Throws ProviderError if the provider fails or returns ragged, short, or
// non-finite output; never returns a partial matrix.
EmbeddingMatrix embed_comments(const Corpus& corpus, EmbeddingProvider& provider);

// Labels every comment (gold labels take precedence).
Corpus label_sentiments(const Corpus& corpus, SentimentProvider& provider);

struct Keyword {
    std::string term;
    double score = 0.0;           // summed candidate/document similarity
    std::size_t doc_freq = 0;     // comments in which the candidate scored > 0
    std::string topic_id;         // set by categorisation

    bool operator==(const Keyword&) const = default;
};

// KeyBERT-style extraction. Every unigram/bigram candidate of a comment is
// scored by cosine similarity between the candidate's embedding and the
// comment's embedding; candidates with positive similarity count toward their
// document frequency. Ranked by document frequency, then summed similarity,
// then term. Throws InvalidArgument for an empty corpus or k == 0.
std::vector<Keyword> extract_keywords(const Corpus& corpus, const EmbeddingMatrix& embeddings,
                                      EmbeddingProvider& provider, std::size_t k = 20);

struct Topic {
    std::string topic_id;
    std::string category;
    std::string description;
    std::vector<std::string> keywords;  // in keyword-rank order

    bool operator==(const Topic&) const = default;
};

struct TopicScheme {
    std::vector<Topic> topics;
    std::vector<Keyword> keywords;  // extraction order, topic_id filled in
    std::string origin;             // "generator" or "clustering"

    const Topic* find(std::string_view topic_id) const;
    // Throws NotFound.
    const Topic& topic(std::string_view topic_id) const;
    const Keyword* find_keyword(std::string_view term) const;

    bool operator==(const TopicScheme&) const = default;
};

void to_json(nlohmann::json& j, const Keyword& k);
void from_json(const nlohmann::json& j, Keyword& k);
void to_json(nlohmann::json& j, const TopicScheme& s);
void from_json(const nlohmann::json& j, TopicScheme& s);

// Checks the scheme invariants: `topic_count` topics, pairwise-disjoint
// keyword sets whose union is exactly `expected` terms. Throws
// SchemaViolation describing the first breach.
void validate_scheme(const TopicScheme& scheme, std::span<const Keyword> expected,
                     std::size_t topic_count);

namespace prompts {
std::string topic_system();
std::string topic_user(const std::string& keywords_string);
std::string summary_system();
std::string summary_user(const std::string& trigger_reason, const std::string& statistics,
                         const std::string& comment_texts);
} // namespace prompts

// Parses a categorisation answer (either a bare array of categories or an
// object holding a 'categories' array) and validates it against `keywords`.
TopicScheme parse_topic_response(const std::string& raw, std::span<const Keyword> keywords,
                                 std::size_t topic_count = 6);

// Deterministic fallback: average-linkage agglomerative clustering of the
// keyword vectors (cosine) down to `topic_count` groups. Each group is named
// after its highest-scoring keyword; topics are ordered by their best rank.
TopicScheme cluster_keywords(std::span<const Keyword> keywords, std::span<const Vector> vectors,
                             std::size_t topic_count = 6);

// Generator path first (prompted, validated, one retry), clustering fallback
// otherwise. `generator` may be null. Throws InvalidArgument if there are
// fewer keywords than topics.
TopicScheme categorize_keywords(std::span<const Keyword> keywords, std::span<const Vector> vectors,
                                TextGenerator* generator, std::size_t topic_count = 6);

// Mean embedding of the comments in which each keyword occurs (stem match);
// the vector representation used by the clustering fallback.
std::vector<Vector> keyword_vectors(const Corpus& corpus, const EmbeddingMatrix& embeddings,
                                    std::span<const Keyword> keywords);

struct Span {
    std::size_t comment = 0;  // corpus index
    std::size_t begin = 0;    // byte offsets, begin < end <= text size
    std::size_t end = 0;

    bool operator==(const Span&) const = default;
    auto operator<=>(const Span&) const = default;
};

using SpanIndex = std::map<std::string, std::vector<Span>, std::less<>>;

// Prefix used when matching a keyword word against comment tokens.
std::string match_stem(std::string_view word);

// Case-insensitive stem matches of each keyword at word starts; a span covers
// the whole matched words. Every keyword gets an entry, possibly empty.
SpanIndex index_keyword_spans(const Corpus& corpus, std::span<const Keyword> keywords);

} // namespace commsense
