#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace commsense {

enum class SentimentLabel { positive, neutral, negative };

std::string_view to_string(SentimentLabel label) noexcept;
// Throws InvalidArgument for anything other than the three lowercase names.
SentimentLabel parse_sentiment(std::string_view name);

void to_json(nlohmann::json& j, SentimentLabel label);
void from_json(const nlohmann::json& j, SentimentLabel& label);

struct Comment {
    std::string id;
    std::string text;
    std::optional<SentimentLabel> sentiment;
    std::optional<std::string> lang;
    std::optional<std::string> source;
    std::optional<SentimentLabel> gold_sentiment;

    bool operator==(const Comment&) const = default;
};

struct SentimentDistribution {
    std::size_t n_total = 0;
    std::size_t n_pos = 0;
    std::size_t n_neu = 0;
    std::size_t n_neg = 0;
    double p_pos = 0.0;
    double p_neu = 0.0;
    double p_neg = 0.0;

    // Fractions are count / n_total, or 0 for an empty scope.
    static SentimentDistribution from_counts(std::size_t pos, std::size_t neu, std::size_t neg);

    void add(SentimentLabel label);
    double positive_to_negative_ratio() const;

    bool operator==(const SentimentDistribution&) const = default;
};

void to_json(nlohmann::json& j, const SentimentDistribution& d);
void from_json(const nlohmann::json& j, SentimentDistribution& d);

// Ordered, immutable collection of comments. File order is the canonical
// order used for every deterministic tie-break downstream.
class Corpus {
public:
    Corpus() = default;
    explicit Corpus(std::vector<Comment> comments);

    std::span<const Comment> comments() const noexcept { return comments_; }
    std::size_t size() const noexcept { return comments_.size(); }
    bool empty() const noexcept { return comments_.empty(); }
    const Comment& operator[](std::size_t i) const { return comments_[i]; }

    std::optional<std::size_t> find(std::string_view id) const;
    // Throws NotFound.
    std::size_t index_of(std::string_view id) const;
    const Comment& at(std::string_view id) const { return comments_[index_of(id)]; }

    // True once every comment carries a sentiment label.
    bool labeled() const noexcept;
    // Label of comment i; throws StateError if the pipeline has not run.
    SentimentLabel sentiment(std::size_t i) const;

    // Copy with resolved sentiment labels, one per comment in order.
    Corpus with_sentiments(std::span<const SentimentLabel> labels) const;

    bool operator==(const Corpus& other) const { return comments_ == other.comments_; }

private:
    std::vector<Comment> comments_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Parses line-delimited JSON records ({id, text} required; lang, source,
// gold_sentiment optional). Blank lines are skipped. When every record has
// gold_sentiment, the labels are applied immediately.
Corpus parse_corpus(std::istream& in);
Corpus ingest_corpus(const std::string& path);

void write_corpus(std::ostream& out, const Corpus& corpus);

SentimentDistribution corpus_stats(const Corpus& corpus);
SentimentDistribution corpus_stats(const Corpus& corpus, std::span<const std::size_t> scope);

} // namespace commsense
