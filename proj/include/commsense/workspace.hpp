#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "commsense/corpus.hpp"
#include "commsense/hexbin.hpp"
#include "commsense/pipeline.hpp"
#include "commsense/projection.hpp"

namespace commsense {

struct PipelineParams {
    std::size_t keyword_count = 20;
    std::size_t topic_count = 6;
    std::size_t bin_capacity = 15;
    double cell_size = 0.11;
    std::uint64_t seed = 42;
    ProjectionMethod projection = ProjectionMethod::tsne;
    std::size_t fallback_embedding_dim = 256;

    // Throws InvalidArgument unless keyword_count >= topic_count >= 1,
    // bin_capacity >= 1 and cell_size > 0.
    void validate() const;
    bool operator==(const PipelineParams&) const = default;
};

void to_json(nlohmann::json& j, const PipelineParams& p);
void from_json(const nlohmann::json& j, PipelineParams& p);

struct Providers {
    EmbeddingProvider* embedder = nullptr;   // required
    SentimentProvider* sentiment = nullptr;  // required unless every comment has gold labels
    TextGenerator* generator = nullptr;      // optional
};

// What the reader has selected in the rings: everything, one topic, or one keyword.
struct Selection {
    enum class Kind { all, topic, keyword };
    Kind kind = Kind::all;
    std::string value;

    static Selection all() { return {}; }
    static Selection topic(std::string id) { return {Kind::topic, std::move(id)}; }
    static Selection keyword(std::string term) { return {Kind::keyword, std::move(term)}; }

    bool operator==(const Selection&) const = default;
};

nlohmann::json selection_json(const Selection& s);

// Immutable product of the preprocessing pipeline, shared by every session.
class Workspace {
public:
    static Workspace build(const Corpus& corpus, const PipelineParams& params, const Providers& providers);

    // Assembles a workspace from precomputed stages: a labelled corpus, its
    // embeddings and a categorised scheme. Spans, layout and rings are derived.
    static Workspace from_parts(Corpus corpus, const PipelineParams& params, EmbeddingMatrix embeddings,
                                TopicScheme scheme);

    // Lossless artifact encoding used by the on-disk cache.
    nlohmann::json to_json() const;
    static Workspace from_json(const nlohmann::json& j);

    const Corpus& corpus() const noexcept { return corpus_; }
    const PipelineParams& params() const noexcept { return params_; }
    const EmbeddingMatrix& embeddings() const noexcept { return embeddings_; }
    const TopicScheme& scheme() const noexcept { return scheme_; }
    const SpanIndex& spans() const noexcept { return spans_; }
    const std::vector<Point2D>& points() const noexcept { return points_; }
    const std::vector<HexBin>& bins() const noexcept { return bins_; }
    const RingModel& rings() const noexcept { return rings_; }

    // Comments matching a topic (union over its keywords) or a keyword, in
    // corpus order. Throw NotFound for unknown ids.
    std::span<const std::size_t> topic_members(std::string_view topic_id) const;
    std::span<const std::size_t> keyword_members(std::string_view term) const;
    bool in_topic(std::size_t comment, std::string_view topic_id) const;
    // Topic ids whose keywords match the comment, in scheme order.
    std::span<const std::string> topics_of(std::size_t comment) const;

    // Sentiment distribution over the whole corpus or one topic (throws NotFound).
    SentimentDistribution stats(std::optional<std::string_view> topic_id = std::nullopt) const;

    // Number of spans in `comment` belonging to keywords of `topic_id`.
    std::size_t keyword_match_count(std::size_t comment, std::string_view topic_id) const;
    std::vector<Span> spans_for(std::size_t comment) const;
    // (keyword, span) pairs of a comment ordered by position.
    std::span<const std::pair<std::string, Span>> keyword_spans(std::size_t comment) const;

    std::vector<std::size_t> resolve(const Selection& selection) const;

private:
    void build_indices();

    Corpus corpus_;
    PipelineParams params_;
    EmbeddingMatrix embeddings_;
    TopicScheme scheme_;
    SpanIndex spans_;
    std::vector<Point2D> points_;
    std::vector<HexBin> bins_;
    RingModel rings_;

    std::map<std::string, std::vector<std::size_t>, std::less<>> topic_members_;
    std::map<std::string, std::vector<std::size_t>, std::less<>> keyword_members_;
    std::map<std::string, SentimentDistribution, std::less<>> topic_stats_;
    std::vector<std::vector<std::string>> topics_of_;
    std::vector<std::vector<std::pair<std::string, Span>>> spans_by_comment_;
    SentimentDistribution global_stats_;
};

} // namespace commsense
