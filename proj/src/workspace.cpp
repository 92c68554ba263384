#include "commsense/workspace.hpp"

#include <algorithm>
#include <set>

#include "commsense/error.hpp"
#include "commsense/log.hpp"

namespace commsense {

using json = nlohmann::json;

void PipelineParams::validate() const {
    if (topic_count < 1) throw InvalidArgument("topic_count must be at least 1");
    if (keyword_count < topic_count) throw InvalidArgument("keyword_count must be >= topic_count");
    if (bin_capacity < 1) throw InvalidArgument("bin_capacity must be at least 1");
    if (!(cell_size > 0.0)) throw InvalidArgument("cell_size must be positive");
    if (fallback_embedding_dim < 2) throw InvalidArgument("fallback_embedding_dim must be >= 2");
}

void to_json(json& j, const PipelineParams& p) {
    j = json{{"keyword_count", p.keyword_count},
             {"topic_count", p.topic_count},
             {"bin_capacity", p.bin_capacity},
             {"cell_size", p.cell_size},
             {"seed", p.seed},
             {"projection", to_string(p.projection)},
             {"fallback_embedding_dim", p.fallback_embedding_dim}};
}

void from_json(const json& j, PipelineParams& p) {
    PipelineParams d;
    p.keyword_count = j.value("keyword_count", d.keyword_count);
    p.topic_count = j.value("topic_count", d.topic_count);
    p.bin_capacity = j.value("bin_capacity", d.bin_capacity);
    p.cell_size = j.value("cell_size", d.cell_size);
    p.seed = j.value("seed", d.seed);
    p.projection = parse_projection_method(j.value("projection", std::string(to_string(d.projection))));
    p.fallback_embedding_dim = j.value("fallback_embedding_dim", d.fallback_embedding_dim);
}

json selection_json(const Selection& s) {
    switch (s.kind) {
    case Selection::Kind::topic: return {{"kind", "topic"}, {"value", s.value}};
    case Selection::Kind::keyword: return {{"kind", "keyword"}, {"value", s.value}};
    case Selection::Kind::all: break;
    }
    return {{"kind", "all"}};
}

Workspace Workspace::build(const Corpus& corpus, const PipelineParams& params, const Providers& providers) {
    params.validate();
    if (providers.embedder == nullptr) throw InvalidArgument("an embedding provider is required");
    if (corpus.empty()) throw InvalidArgument("corpus is empty");

    Workspace ws;
    ws.params_ = params;
    if (corpus.labeled()) {
        ws.corpus_ = corpus;
    } else {
        if (providers.sentiment == nullptr) throw InvalidArgument("a sentiment provider is required");
        ws.corpus_ = label_sentiments(corpus, *providers.sentiment);
    }
    log::info("embedding " + std::to_string(corpus.size()) + " comments with " + providers.embedder->name());
    ws.embeddings_ = embed_comments(ws.corpus_, *providers.embedder);

    auto keywords = extract_keywords(ws.corpus_, ws.embeddings_, *providers.embedder, params.keyword_count);
    if (keywords.size() < params.topic_count) {
        throw InvalidArgument("corpus yields only " + std::to_string(keywords.size()) +
                              " keyword candidates; need " + std::to_string(params.topic_count));
    }
    const auto vectors = keyword_vectors(ws.corpus_, ws.embeddings_, keywords);
    ws.scheme_ = categorize_keywords(keywords, vectors, providers.generator, params.topic_count);
    ws.spans_ = index_keyword_spans(ws.corpus_, ws.scheme_.keywords);

    ws.points_ = project_2d(ws.embeddings_, params.projection, params.seed);
    ws.bins_ = build_hexbins(ws.points_, {params.bin_capacity, params.cell_size, 6});
    ws.rings_ = build_rings(ws.scheme_, ws.spans_);
    ws.build_indices();
    return ws;
}

Workspace Workspace::from_parts(Corpus corpus, const PipelineParams& params, EmbeddingMatrix embeddings,
                                TopicScheme scheme) {
    params.validate();
    if (!corpus.labeled()) throw InvalidArgument("from_parts needs a corpus with sentiment labels");
    if (embeddings.size() != corpus.size()) throw InvalidArgument("embedding rows do not match the corpus");
    validate_scheme(scheme, scheme.keywords, scheme.topics.size());
    Workspace ws;
    ws.params_ = params;
    ws.corpus_ = std::move(corpus);
    ws.embeddings_ = std::move(embeddings);
    ws.scheme_ = std::move(scheme);
    ws.spans_ = index_keyword_spans(ws.corpus_, ws.scheme_.keywords);
    ws.points_ = project_2d(ws.embeddings_, params.projection, params.seed);
    ws.bins_ = build_hexbins(ws.points_, {params.bin_capacity, params.cell_size, 6});
    ws.rings_ = build_rings(ws.scheme_, ws.spans_);
    ws.build_indices();
    return ws;
}

namespace {

json comment_json(const Comment& c) {
    json j{{"id", c.id}, {"text", c.text}};
    if (c.sentiment) j["sentiment"] = *c.sentiment;
    if (c.lang) j["lang"] = *c.lang;
    if (c.source) j["source"] = *c.source;
    if (c.gold_sentiment) j["gold_sentiment"] = *c.gold_sentiment;
    return j;
}

Comment comment_from_json(const json& j) {
    Comment c;
    c.id = j.at("id").get<std::string>();
    c.text = j.at("text").get<std::string>();
    if (j.contains("sentiment")) c.sentiment = j["sentiment"].get<SentimentLabel>();
    if (j.contains("lang")) c.lang = j["lang"].get<std::string>();
    if (j.contains("source")) c.source = j["source"].get<std::string>();
    if (j.contains("gold_sentiment")) c.gold_sentiment = j["gold_sentiment"].get<SentimentLabel>();
    return c;
}

} // namespace

json Workspace::to_json() const {
    json j;
    j["params"] = params_;
    j["comments"] = json::array();
    for (const auto& c : corpus_.comments()) j["comments"].push_back(comment_json(c));
    j["embeddings"] = {{"dim", embeddings_.dim}, {"rows", embeddings_.rows}};
    j["scheme"] = scheme_;
    j["spans"] = json::object();
    for (const auto& [term, list] : spans_) {
        json arr = json::array();
        for (const auto& s : list) arr.push_back({s.comment, s.begin, s.end});
        j["spans"][term] = std::move(arr);
    }
    j["points"] = json::array();
    for (const auto& p : points_) j["points"].push_back({p.comment, p.x, p.y});
    j["bins"] = bins_;
    j["rings"] = rings_;
    return j;
}

Workspace Workspace::from_json(const json& j) {
    Workspace ws;
    ws.params_ = j.at("params").get<PipelineParams>();
    std::vector<Comment> comments;
    for (const auto& c : j.at("comments")) comments.push_back(comment_from_json(c));
    ws.corpus_ = Corpus(std::move(comments));
    ws.embeddings_.dim = j.at("embeddings").at("dim").get<std::size_t>();
    ws.embeddings_.rows = j.at("embeddings").at("rows").get<std::vector<Vector>>();
    ws.scheme_ = j.at("scheme").get<TopicScheme>();
    for (const auto& [term, arr] : j.at("spans").items()) {
        auto& list = ws.spans_[term];
        for (const auto& s : arr) list.push_back({s[0].get<std::size_t>(), s[1].get<std::size_t>(), s[2].get<std::size_t>()});
    }
    for (const auto& p : j.at("points")) {
        ws.points_.push_back({p[0].get<std::size_t>(), p[1].get<double>(), p[2].get<double>()});
    }
    ws.bins_ = j.at("bins").get<std::vector<HexBin>>();
    ws.rings_ = j.at("rings").get<RingModel>();
    ws.build_indices();
    return ws;
}

void Workspace::build_indices() {
    const std::size_t n = corpus_.size();
    topics_of_.assign(n, {});
    spans_by_comment_.assign(n, {});
    keyword_members_.clear();
    topic_members_.clear();
    topic_stats_.clear();

    for (const auto& [term, list] : spans_) {
        std::set<std::size_t> docs;
        for (const auto& s : list) {
            docs.insert(s.comment);
            spans_by_comment_.at(s.comment).emplace_back(term, s);
        }
        keyword_members_[term].assign(docs.begin(), docs.end());
    }
    for (auto& list : spans_by_comment_) {
        std::sort(list.begin(), list.end(), [](const auto& a, const auto& b) {
            return std::tie(a.second.begin, a.second.end, a.first) < std::tie(b.second.begin, b.second.end, b.first);
        });
    }
    for (const auto& topic : scheme_.topics) {
        std::set<std::size_t> docs;
        for (const auto& kw : topic.keywords) {
            if (auto it = keyword_members_.find(kw); it != keyword_members_.end()) {
                docs.insert(it->second.begin(), it->second.end());
            } else {
                keyword_members_[kw];
            }
        }
        auto& members = topic_members_[topic.topic_id];
        members.assign(docs.begin(), docs.end());
        for (auto d : members) topics_of_[d].push_back(topic.topic_id);
        topic_stats_[topic.topic_id] = corpus_stats(corpus_, members);
    }
    global_stats_ = corpus_stats(corpus_);
}

std::span<const std::size_t> Workspace::topic_members(std::string_view topic_id) const {
    auto it = topic_members_.find(topic_id);
    if (it == topic_members_.end()) throw NotFound("unknown topic '" + std::string(topic_id) + "'");
    return it->second;
}

std::span<const std::size_t> Workspace::keyword_members(std::string_view term) const {
    auto it = keyword_members_.find(term);
    if (it == keyword_members_.end()) throw NotFound("unknown keyword '" + std::string(term) + "'");
    return it->second;
}

bool Workspace::in_topic(std::size_t comment, std::string_view topic_id) const {
    const auto members = topic_members(topic_id);
    return std::binary_search(members.begin(), members.end(), comment);
}

std::span<const std::string> Workspace::topics_of(std::size_t comment) const {
    return topics_of_.at(comment);
}

SentimentDistribution Workspace::stats(std::optional<std::string_view> topic_id) const {
    if (!topic_id) return global_stats_;
    auto it = topic_stats_.find(*topic_id);
    if (it == topic_stats_.end()) throw NotFound("unknown topic '" + std::string(*topic_id) + "'");
    return it->second;
}

std::size_t Workspace::keyword_match_count(std::size_t comment, std::string_view topic_id) const {
    const auto& topic = scheme_.topic(topic_id);
    std::size_t count = 0;
    for (const auto& [term, span] : spans_by_comment_.at(comment)) {
        if (std::find(topic.keywords.begin(), topic.keywords.end(), term) != topic.keywords.end()) ++count;
    }
    return count;
}

std::vector<Span> Workspace::spans_for(std::size_t comment) const {
    std::vector<Span> out;
    for (const auto& [term, span] : spans_by_comment_.at(comment)) out.push_back(span);
    return out;
}

std::span<const std::pair<std::string, Span>> Workspace::keyword_spans(std::size_t comment) const {
    return spans_by_comment_.at(comment);
}

std::vector<std::size_t> Workspace::resolve(const Selection& selection) const {
    switch (selection.kind) {
    case Selection::Kind::topic: {
        auto m = topic_members(selection.value);
        return {m.begin(), m.end()};
    }
    case Selection::Kind::keyword: {
        auto m = keyword_members(selection.value);
        return {m.begin(), m.end()};
    }
    case Selection::Kind::all: break;
    }
    std::vector<std::size_t> all(corpus_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return all;
}

} // namespace commsense
