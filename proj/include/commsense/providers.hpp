#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "commsense/corpus.hpp"
#include "commsense/vector_math.hpp"

namespace commsense {

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    // One vector per input, all of the same dimension. Throws ProviderError.
    virtual std::vector<Vector> embed(std::span<const std::string> texts) = 0;
    virtual std::string name() const = 0;
};

class SentimentProvider {
public:
    virtual ~SentimentProvider() = default;
    virtual SentimentLabel classify(std::string_view text) = 0;
    virtual std::string name() const = 0;
};

struct ChatRequest {
    std::string system;
    std::string user;
    double temperature = 0.0;
    bool json_response = true;
};

class TextGenerator {
public:
    virtual ~TextGenerator() = default;
    // Raw assistant message content. Throws ProviderError on transport failure.
    virtual std::string complete(const ChatRequest& request) = 0;
    virtual std::string name() const = 0;
};

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

// Offline embedder: signed feature hashing of the unigram/bigram candidates
// of a text, L2-normalised. A pure function of (text, dim).
class HashedBagOfWordsEmbedder final : public EmbeddingProvider {
public:
    explicit HashedBagOfWordsEmbedder(std::size_t dim = 256);

    std::vector<Vector> embed(std::span<const std::string> texts) override;
    std::string name() const override { return "hashed-bow-" + std::to_string(dim_); }

    Vector embed_one(std::string_view text) const;
    std::size_t dim() const noexcept { return dim_; }

private:
    std::size_t dim_;
};

// Offline sentiment: sums seed-lexicon polarities, flipping a word's sign
// when one of the three preceding tokens is a negator. Positive sum means
// positive, negative sum negative, zero (including no hits) neutral.
class LexiconSentiment final : public SentimentProvider {
public:
    SentimentLabel classify(std::string_view text) override;
    std::string name() const override { return "seed-lexicon"; }

    static int polarity_score(std::string_view text);
    static int word_polarity(std::string_view lowered_word);
};

// gold_sentiment wins; otherwise the provider decides. Empty text is an error.
SentimentLabel classify_sentiment(const Comment& comment, SentimentProvider& provider);
SentimentLabel classify_sentiment(std::string_view text, SentimentProvider& provider);

} // namespace commsense
