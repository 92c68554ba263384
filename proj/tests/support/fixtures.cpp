#include "fixtures.hpp"

#include <cmath>

#include "commsense/error.hpp"
#include "commsense/log.hpp"

namespace commsense::testing {

const Corpus& fixture_corpus() {
    static const Corpus corpus = ingest_corpus(COMMSENSE_FIXTURE);
    return corpus;
}

std::shared_ptr<const Workspace> fixture_workspace() {
    static const auto ws = [] {
        auto quiet = log::set_sink([](log::Level, std::string_view) {});
        HashedBagOfWordsEmbedder embedder;
        LexiconSentiment sentiment;
        auto built = std::make_shared<const Workspace>(
            Workspace::build(fixture_corpus(), PipelineParams{}, Providers{&embedder, &sentiment, nullptr}));
        log::set_sink(quiet);
        return built;
    }();
    return ws;
}

std::shared_ptr<const Workspace> synthetic_workspace(
    const std::vector<SyntheticComment>& comments,
    const std::vector<std::pair<std::string, std::vector<std::string>>>& topics) {
    std::vector<Comment> list;
    EmbeddingMatrix emb;
    for (std::size_t i = 0; i < comments.size(); ++i) {
        Comment c;
        c.id = "s" + std::to_string(i + 1);
        c.text = comments[i].text;
        c.sentiment = comments[i].sentiment;
        list.push_back(std::move(c));
        emb.rows.push_back(comments[i].embedding);
    }
    emb.dim = emb.rows.empty() ? 0 : emb.rows.front().size();

    TopicScheme scheme;
    scheme.origin = "clustering";
    double score = 1000.0;
    for (std::size_t t = 0; t < topics.size(); ++t) {
        Topic topic;
        topic.topic_id = "t" + std::to_string(t + 1);
        topic.category = topics[t].first;
        topic.keywords = topics[t].second;
        for (const auto& kw : topic.keywords) scheme.keywords.push_back({kw, score--, 0, topic.topic_id});
        scheme.topics.push_back(std::move(topic));
    }
    PipelineParams params;
    params.projection = ProjectionMethod::linear;
    params.keyword_count = scheme.keywords.size();
    params.topic_count = scheme.topics.size();
    return std::make_shared<const Workspace>(
        Workspace::from_parts(Corpus(std::move(list)), params, std::move(emb), std::move(scheme)));
}

std::vector<SyntheticComment> labelled_block(const std::string& keyword, std::size_t pos, std::size_t neu,
                                             std::size_t neg, std::size_t dim) {
    std::vector<SyntheticComment> out;
    const std::size_t n = pos + neu + neg;
    for (std::size_t i = 0; i < n; ++i) {
        const auto label = i < pos ? SentimentLabel::positive
                                   : i < pos + neu ? SentimentLabel::neutral : SentimentLabel::negative;
        Vector v(dim, 0.0);
        v[i % dim] = 1.0;
        v[(i * 7 + 3) % dim] += 0.5 + 0.01 * static_cast<double>(i);
        normalize(v);
        out.push_back({"Comment " + std::to_string(i + 1) + " about the " + keyword + ".", label, v});
    }
    return out;
}

ScriptedGenerator::ScriptedGenerator(std::vector<std::string> answers) : answers_(answers.begin(), answers.end()) {}

std::string ScriptedGenerator::complete(const ChatRequest& request) {
    std::lock_guard lock(mutex_);
    requests_.push_back(request);
    if (answers_.empty()) throw ProviderError("scripted generator exhausted");
    auto a = std::move(answers_.front());
    answers_.pop_front();
    return a;
}

std::vector<ChatRequest> ScriptedGenerator::requests() const {
    std::lock_guard lock(mutex_);
    return requests_;
}

} // namespace commsense::testing
