#include "commsense/corpus.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "commsense/error.hpp"

namespace commsense {

std::string_view to_string(SentimentLabel label) noexcept {
    switch (label) {
    case SentimentLabel::positive: return "positive";
    case SentimentLabel::neutral: return "neutral";
    case SentimentLabel::negative: return "negative";
    }
    return "neutral";
}

SentimentLabel parse_sentiment(std::string_view name) {
    if (name == "positive") return SentimentLabel::positive;
    if (name == "neutral") return SentimentLabel::neutral;
    if (name == "negative") return SentimentLabel::negative;
    throw InvalidArgument("unknown sentiment label '" + std::string(name) + "'");
}

void to_json(nlohmann::json& j, SentimentLabel label) { j = std::string(to_string(label)); }

void from_json(const nlohmann::json& j, SentimentLabel& label) {
    label = parse_sentiment(j.get<std::string>());
}

SentimentDistribution SentimentDistribution::from_counts(std::size_t pos, std::size_t neu,
                                                         std::size_t neg) {
    SentimentDistribution d;
    d.n_pos = pos;
    d.n_neu = neu;
    d.n_neg = neg;
    d.n_total = pos + neu + neg;
    if (d.n_total > 0) {
        const double n = static_cast<double>(d.n_total);
        d.p_pos = static_cast<double>(pos) / n;
        d.p_neu = static_cast<double>(neu) / n;
        d.p_neg = static_cast<double>(neg) / n;
    }
    return d;
}

void SentimentDistribution::add(SentimentLabel label) {
    switch (label) {
    case SentimentLabel::positive: ++n_pos; break;
    case SentimentLabel::neutral: ++n_neu; break;
    case SentimentLabel::negative: ++n_neg; break;
    }
    *this = from_counts(n_pos, n_neu, n_neg);
}

double SentimentDistribution::positive_to_negative_ratio() const {
    return n_neg == 0 ? 0.0 : static_cast<double>(n_pos) / static_cast<double>(n_neg);
}

void to_json(nlohmann::json& j, const SentimentDistribution& d) {
    j = nlohmann::json{{"n_total", d.n_total}, {"n_pos", d.n_pos}, {"n_neu", d.n_neu},
                       {"n_neg", d.n_neg},     {"p_pos", d.p_pos}, {"p_neu", d.p_neu},
                       {"p_neg", d.p_neg}};
}

void from_json(const nlohmann::json& j, SentimentDistribution& d) {
    d = SentimentDistribution::from_counts(j.at("n_pos").get<std::size_t>(),
                                           j.at("n_neu").get<std::size_t>(),
                                           j.at("n_neg").get<std::size_t>());
}

Corpus::Corpus(std::vector<Comment> comments) : comments_(std::move(comments)) {
    index_.reserve(comments_.size());
    for (std::size_t i = 0; i < comments_.size(); ++i) {
        if (!index_.emplace(comments_[i].id, i).second) {
            throw InvalidArgument("duplicate comment id '" + comments_[i].id + "'");
        }
    }
}

std::optional<std::size_t> Corpus::find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t Corpus::index_of(std::string_view id) const {
    if (auto i = find(id)) return *i;
    throw NotFound("unknown comment '" + std::string(id) + "'");
}

bool Corpus::labeled() const noexcept {
    for (const auto& c : comments_) {
        if (!c.sentiment) return false;
    }
    return true;
}

SentimentLabel Corpus::sentiment(std::size_t i) const {
    const auto& c = comments_.at(i);
    if (!c.sentiment) throw StateError("comment '" + c.id + "' has no sentiment label yet");
    return *c.sentiment;
}

Corpus Corpus::with_sentiments(std::span<const SentimentLabel> labels) const {
    if (labels.size() != comments_.size()) {
        throw InvalidArgument("label count does not match corpus size");
    }
    std::vector<Comment> out = comments_;
    for (std::size_t i = 0; i < out.size(); ++i) out[i].sentiment = labels[i];
    return Corpus(std::move(out));
}

namespace {

std::optional<std::string> optional_string(const nlohmann::json& rec, const char* key,
                                           std::size_t line) {
    auto it = rec.find(key);
    if (it == rec.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw CorpusError(line, std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

} // namespace

Corpus parse_corpus(std::istream& in) {
    std::vector<Comment> comments;
    std::unordered_map<std::string, std::size_t> seen;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (raw.find_first_not_of(" \t") == std::string::npos) continue;

        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(raw);
        } catch (const nlohmann::json::parse_error& e) {
            throw CorpusError(line, std::string("malformed record: ") + e.what());
        }
        if (!rec.is_object()) throw CorpusError(line, "record is not an object");

        Comment c;
        auto id = optional_string(rec, "id", line);
        if (!id || id->empty()) throw CorpusError(line, "missing id");
        auto text = optional_string(rec, "text", line);
        if (!text) throw CorpusError(line, "missing text");
        if (text->empty()) throw CorpusError(line, "empty text");
        c.id = std::move(*id);
        c.text = std::move(*text);
        c.lang = optional_string(rec, "lang", line);
        c.source = optional_string(rec, "source", line);
        if (auto gold = optional_string(rec, "gold_sentiment", line)) {
            try {
                c.gold_sentiment = parse_sentiment(*gold);
            } catch (const InvalidArgument& e) {
                throw CorpusError(line, e.what());
            }
        }

        auto [it, inserted] = seen.emplace(c.id, line);
        if (!inserted) {
            throw CorpusError(line, "duplicate id '" + c.id + "' (first seen on line " +
                                        std::to_string(it->second) + ")");
        }
        comments.push_back(std::move(c));
    }

    bool all_gold = !comments.empty();
    for (const auto& c : comments) all_gold = all_gold && c.gold_sentiment.has_value();
    if (all_gold) {
        for (auto& c : comments) c.sentiment = c.gold_sentiment;
    }
    return Corpus(std::move(comments));
}

Corpus ingest_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open corpus file '" + path + "'");
    return parse_corpus(in);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
    for (const auto& c : corpus.comments()) {
        nlohmann::ordered_json rec{{"id", c.id}, {"text", c.text}};
        if (c.lang) rec["lang"] = *c.lang;
        if (c.source) rec["source"] = *c.source;
        if (c.gold_sentiment) rec["gold_sentiment"] = to_string(*c.gold_sentiment);
        out << rec.dump() << '\n';
    }
}

SentimentDistribution corpus_stats(const Corpus& corpus) {
    std::vector<std::size_t> all(corpus.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return corpus_stats(corpus, all);
}

SentimentDistribution corpus_stats(const Corpus& corpus, std::span<const std::size_t> scope) {
    std::size_t pos = 0, neu = 0, neg = 0;
    for (std::size_t i : scope) {
        switch (corpus.sentiment(i)) {
        case SentimentLabel::positive: ++pos; break;
        case SentimentLabel::neutral: ++neu; break;
        case SentimentLabel::negative: ++neg; break;
        }
    }
    return SentimentDistribution::from_counts(pos, neu, neg);
}

} // namespace commsense
