#include "commsense/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <unordered_map>

#include "commsense/error.hpp"
#include "commsense/log.hpp"
#include "commsense/text.hpp"

namespace commsense {

using json = nlohmann::json;

EmbeddingMatrix embed_comments(const Corpus& corpus, EmbeddingProvider& provider) {
    std::vector<std::string> texts;
    texts.reserve(corpus.size());
    for (const auto& c : corpus.comments()) texts.push_back(c.text);

    std::vector<Vector> rows;
    try {
        rows = provider.embed(texts);
    } catch (const ProviderError&) {
        throw;
    } catch (const std::exception& e) {
        throw ProviderError("embedding provider '" + provider.name() + "' failed: " + e.what());
    }
    if (rows.size() != corpus.size()) {
        throw ProviderError("embedding provider '" + provider.name() + "' returned " +
                            std::to_string(rows.size()) + " vectors for " +
                            std::to_string(corpus.size()) + " comments");
    }
    EmbeddingMatrix m;
    m.dim = rows.empty() ? 0 : rows.front().size();
    for (const auto& r : rows) {
        if (r.size() != m.dim || m.dim == 0) {
            throw ProviderError("embedding provider '" + provider.name() + "' returned ragged vectors");
        }
        for (double x : r) {
            if (!std::isfinite(x)) {
                throw ProviderError("embedding provider '" + provider.name() + "' returned non-finite values");
            }
        }
    }
    m.rows = std::move(rows);
    return m;
}

Corpus label_sentiments(const Corpus& corpus, SentimentProvider& provider) {
    std::vector<SentimentLabel> labels;
    labels.reserve(corpus.size());
    for (const auto& c : corpus.comments()) labels.push_back(classify_sentiment(c, provider));
    return corpus.with_sentiments(labels);
}

std::vector<Keyword> extract_keywords(const Corpus& corpus, const EmbeddingMatrix& embeddings,
                                      EmbeddingProvider& provider, std::size_t k) {
    if (corpus.empty()) throw InvalidArgument("cannot extract keywords from an empty corpus");
    if (k == 0) throw InvalidArgument("keyword count must be at least 1");
    if (embeddings.size() != corpus.size()) {
        throw InvalidArgument("embeddings do not cover the corpus");
    }

    std::vector<std::vector<std::string>> per_comment(corpus.size());
    std::set<std::string> vocabulary;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        auto cands = text::candidate_phrases(corpus[i].text);
        std::sort(cands.begin(), cands.end());
        cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
        vocabulary.insert(cands.begin(), cands.end());
        per_comment[i] = std::move(cands);
    }

    const std::vector<std::string> terms(vocabulary.begin(), vocabulary.end());
    const auto term_vectors = provider.embed(terms);
    if (term_vectors.size() != terms.size()) {
        throw ProviderError("embedding provider returned the wrong number of candidate vectors");
    }
    std::unordered_map<std::string, std::size_t> term_index;
    for (std::size_t t = 0; t < terms.size(); ++t) term_index.emplace(terms[t], t);

    std::vector<std::size_t> df(terms.size(), 0);
    std::vector<double> score(terms.size(), 0.0);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        for (const auto& cand : per_comment[i]) {
            const std::size_t t = term_index.at(cand);
            const double sim = cosine(term_vectors[t], embeddings.row(i));
            if (sim > 0.0) {
                ++df[t];
                score[t] += sim;
            }
        }
    }

    std::vector<std::size_t> order;
    for (std::size_t t = 0; t < terms.size(); ++t) {
        if (df[t] > 0) order.push_back(t);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (df[a] != df[b]) return df[a] > df[b];
        if (score[a] != score[b]) return score[a] > score[b];
        return terms[a] < terms[b];
    });
    order.resize(std::min(order.size(), k));

    std::vector<Keyword> out;
    out.reserve(order.size());
    for (std::size_t t : order) out.push_back({terms[t], score[t], df[t], {}});
    return out;
}

const Topic* TopicScheme::find(std::string_view topic_id) const {
    for (const auto& t : topics) {
        if (t.topic_id == topic_id) return &t;
    }
    return nullptr;
}

const Topic& TopicScheme::topic(std::string_view topic_id) const {
    if (const auto* t = find(topic_id)) return *t;
    throw NotFound("unknown topic '" + std::string(topic_id) + "'");
}

const Keyword* TopicScheme::find_keyword(std::string_view term) const {
    for (const auto& k : keywords) {
        if (k.term == term) return &k;
    }
    return nullptr;
}

void to_json(json& j, const Keyword& k) {
    j = json{{"term", k.term}, {"score", k.score}, {"doc_freq", k.doc_freq}, {"topic_id", k.topic_id}};
}

void from_json(const json& j, Keyword& k) {
    k.term = j.at("term").get<std::string>();
    k.score = j.at("score").get<double>();
    k.doc_freq = j.at("doc_freq").get<std::size_t>();
    k.topic_id = j.value("topic_id", std::string{});
}

void to_json(json& j, const TopicScheme& s) {
    j = json{{"origin", s.origin}, {"keywords", s.keywords}, {"topics", json::array()}};
    for (const auto& t : s.topics) {
        j["topics"].push_back({{"topic_id", t.topic_id},
                               {"category", t.category},
                               {"description", t.description},
                               {"keywords", t.keywords}});
    }
}

void from_json(const json& j, TopicScheme& s) {
    s.origin = j.value("origin", std::string{});
    s.keywords = j.at("keywords").get<std::vector<Keyword>>();
    s.topics.clear();
    for (const auto& t : j.at("topics")) {
        s.topics.push_back({t.at("topic_id").get<std::string>(), t.at("category").get<std::string>(),
                            t.at("description").get<std::string>(),
                            t.at("keywords").get<std::vector<std::string>>()});
    }
}

void validate_scheme(const TopicScheme& scheme, std::span<const Keyword> expected,
                     std::size_t topic_count) {
    if (scheme.topics.size() != topic_count) {
        throw SchemaViolation("expected " + std::to_string(topic_count) + " categories, got " +
                                  std::to_string(scheme.topics.size()),
                              {});
    }
    std::set<std::string> wanted;
    for (const auto& k : expected) wanted.insert(k.term);
    std::set<std::string> seen;
    for (const auto& t : scheme.topics) {
        if (t.category.empty()) throw SchemaViolation("category with empty name", {});
        for (const auto& kw : t.keywords) {
            if (!wanted.count(kw)) {
                throw SchemaViolation("keyword '" + kw + "' was not among the extracted keywords", {});
            }
            if (!seen.insert(kw).second) {
                throw SchemaViolation("keyword '" + kw + "' appears in more than one category", {});
            }
        }
    }
    for (const auto& w : wanted) {
        if (!seen.count(w)) throw SchemaViolation("keyword '" + w + "' is not assigned to any category", {});
    }
}

namespace {

std::string strip_code_fence(const std::string& raw) {
    auto first = raw.find("```");
    if (first == std::string::npos) return raw;
    auto body_start = raw.find('\n', first);
    auto last = raw.rfind("```");
    if (body_start == std::string::npos || last <= body_start) return raw;
    return raw.substr(body_start + 1, last - body_start - 1);
}

// Fills topic ids, orders each topic's keywords by rank, and copies
// topic ids onto the keyword list.
TopicScheme finish_scheme(std::vector<Topic> topics, std::span<const Keyword> keywords,
                          std::string origin) {
    std::unordered_map<std::string, std::size_t> rank;
    for (std::size_t i = 0; i < keywords.size(); ++i) rank.emplace(keywords[i].term, i);

    TopicScheme scheme;
    scheme.origin = std::move(origin);
    scheme.keywords.assign(keywords.begin(), keywords.end());
    for (std::size_t t = 0; t < topics.size(); ++t) {
        auto& topic = topics[t];
        topic.topic_id = "t" + std::to_string(t + 1);
        std::sort(topic.keywords.begin(), topic.keywords.end(),
                  [&](const std::string& a, const std::string& b) { return rank.at(a) < rank.at(b); });
        for (const auto& kw : topic.keywords) scheme.keywords[rank.at(kw)].topic_id = topic.topic_id;
    }
    scheme.topics = std::move(topics);
    return scheme;
}

} // namespace

TopicScheme parse_topic_response(const std::string& raw, std::span<const Keyword> keywords,
                                 std::size_t topic_count) {
    json doc;
    try {
        doc = json::parse(strip_code_fence(raw));
    } catch (const json::parse_error& e) {
        throw SchemaViolation(std::string("response is not JSON: ") + e.what(), raw);
    }
    const json* list = nullptr;
    if (doc.is_array()) {
        list = &doc;
    } else if (doc.is_object() && doc.contains("categories") && doc["categories"].is_array()) {
        list = &doc["categories"];
    } else {
        throw SchemaViolation("response holds no 'categories' list", raw);
    }

    std::vector<Topic> topics;
    for (const auto& item : *list) {
        if (!item.is_object() || !item.contains("category") || !item["category"].is_string() ||
            !item.contains("keywords") || !item["keywords"].is_array()) {
            throw SchemaViolation("category entry lacks 'category' or 'keywords'", raw);
        }
        Topic t;
        t.category = item["category"].get<std::string>();
        if (item.contains("description") && item["description"].is_string()) {
            t.description = item["description"].get<std::string>();
        }
        for (const auto& kw : item["keywords"]) {
            if (!kw.is_string()) throw SchemaViolation("non-string keyword", raw);
            t.keywords.push_back(text::lowercase(kw.get<std::string>()));
        }
        topics.push_back(std::move(t));
    }

    // Validate before ranking so unknown keywords surface as violations.
    TopicScheme draft;
    draft.topics = topics;
    try {
        validate_scheme(draft, keywords, topic_count);
    } catch (const SchemaViolation& e) {
        throw SchemaViolation(e.what(), raw);
    }
    return finish_scheme(std::move(topics), keywords, "generator");
}

TopicScheme cluster_keywords(std::span<const Keyword> keywords, std::span<const Vector> vectors,
                             std::size_t topic_count) {
    if (topic_count == 0) throw InvalidArgument("topic count must be positive");
    if (keywords.size() < topic_count) {
        throw InvalidArgument("need at least " + std::to_string(topic_count) + " keywords, got " +
                              std::to_string(keywords.size()));
    }
    if (vectors.size() != keywords.size()) throw InvalidArgument("one vector per keyword required");

    const std::size_t n = keywords.size();
    std::vector<std::vector<double>> sim(n, std::vector<double>(n, 0.0));
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) sim[a][b] = sim[b][a] = cosine(vectors[a], vectors[b]);
    }

    // Clusters hold keyword ranks in ascending order; the cluster list stays
    // sorted by each cluster's best rank.
    std::vector<std::vector<std::size_t>> clusters(n);
    for (std::size_t i = 0; i < n; ++i) clusters[i] = {i};

    auto linkage = [&](const std::vector<std::size_t>& x, const std::vector<std::size_t>& y) {
        double total = 0.0;
        for (auto a : x) {
            for (auto b : y) total += sim[a][b];
        }
        return total / static_cast<double>(x.size() * y.size());
    };

    while (clusters.size() > topic_count) {
        std::size_t best_a = 0, best_b = 1;
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < clusters.size(); ++a) {
            for (std::size_t b = a + 1; b < clusters.size(); ++b) {
                const double l = linkage(clusters[a], clusters[b]);
                if (l > best) {
                    best = l;
                    best_a = a;
                    best_b = b;
                }
            }
        }
        auto& into = clusters[best_a];
        into.insert(into.end(), clusters[best_b].begin(), clusters[best_b].end());
        std::sort(into.begin(), into.end());
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(best_b));
    }

    std::vector<Topic> topics;
    for (const auto& members : clusters) {
        std::size_t lead = members.front();
        for (auto m : members) {
            if (keywords[m].score > keywords[lead].score) lead = m;
        }
        Topic t;
        std::string name = keywords[lead].term;
        if (!name.empty() && name[0] >= 'a' && name[0] <= 'z') name[0] = static_cast<char>(name[0] - 'a' + 'A');
        t.category = name;
        t.description = "Comments about ";
        for (std::size_t i = 0; i < members.size(); ++i) {
            if (i > 0) t.description += ", ";
            t.description += keywords[members[i]].term;
            t.keywords.push_back(keywords[members[i]].term);
        }
        t.description += ".";
        topics.push_back(std::move(t));
    }
    return finish_scheme(std::move(topics), keywords, "clustering");
}

TopicScheme categorize_keywords(std::span<const Keyword> keywords, std::span<const Vector> vectors,
                                TextGenerator* generator, std::size_t topic_count) {
    if (keywords.size() < topic_count) {
        throw InvalidArgument("need at least " + std::to_string(topic_count) + " keywords, got " +
                              std::to_string(keywords.size()));
    }
    if (generator != nullptr) {
        std::string keywords_string;
        for (std::size_t i = 0; i < keywords.size(); ++i) {
            if (i > 0) keywords_string += ", ";
            keywords_string += keywords[i].term;
        }
        const ChatRequest request{prompts::topic_system(), prompts::topic_user(keywords_string), 0.0, true};
        for (int attempt = 1; attempt <= 2; ++attempt) {
            try {
                return parse_topic_response(generator->complete(request), keywords, topic_count);
            } catch (const SchemaViolation& e) {
                log::warning("topic categorisation attempt " + std::to_string(attempt) +
                             " violated the schema: " + e.what() + "; raw response: " +
                             e.raw_response().substr(0, 2000));
            } catch (const ProviderError& e) {
                log::warning("topic categorisation attempt " + std::to_string(attempt) +
                             " failed: " + e.what());
            }
        }
        log::warning("falling back to keyword clustering for topic categorisation");
    }
    return cluster_keywords(keywords, vectors, topic_count);
}

std::string match_stem(std::string_view word) {
    std::string s = text::stem(word);
    if (s.size() > 3 && (s.back() == 'y' || s.back() == 'e')) s.pop_back();
    return s;
}

SpanIndex index_keyword_spans(const Corpus& corpus, std::span<const Keyword> keywords) {
    struct Pattern {
        std::string term;
        std::vector<std::string> stems;
    };
    std::vector<Pattern> patterns;
    SpanIndex index;
    for (const auto& k : keywords) {
        Pattern p{k.term, {}};
        for (const auto& tok : text::tokenize(k.term)) p.stems.push_back(match_stem(tok.norm));
        index[k.term];
        if (!p.stems.empty()) patterns.push_back(std::move(p));
    }

    for (std::size_t c = 0; c < corpus.size(); ++c) {
        const auto tokens = text::tokenize(corpus[c].text);
        for (const auto& p : patterns) {
            const std::size_t n = p.stems.size();
            for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
                bool ok = true;
                for (std::size_t j = 0; j < n && ok; ++j) {
                    ok = tokens[i + j].norm.starts_with(p.stems[j]);
                }
                if (!ok) continue;
                index[p.term].push_back(
                    {c, tokens[i].begin, tokens[i + n - 1].end});
            }
        }
    }
    return index;
}

std::vector<Vector> keyword_vectors(const Corpus& corpus, const EmbeddingMatrix& embeddings,
                                    std::span<const Keyword> keywords) {
    const auto spans = index_keyword_spans(corpus, keywords);
    std::vector<Vector> out;
    out.reserve(keywords.size());
    for (const auto& k : keywords) {
        Vector v(embeddings.dim, 0.0);
        std::set<std::size_t> docs;
        for (const auto& s : spans.at(k.term)) docs.insert(s.comment);
        for (auto d : docs) {
            const auto row = embeddings.row(d);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] += row[i];
        }
        if (!docs.empty()) {
            for (auto& x : v) x /= static_cast<double>(docs.size());
        }
        out.push_back(std::move(v));
    }
    return out;
}

} // namespace commsense
