#include "commsense/navigation.hpp"

#include <algorithm>
#include <deque>

#include "commsense/error.hpp"

namespace commsense {

std::optional<ContrastPair> find_contrast_pair(const Workspace& ws, std::span<const std::size_t> candidates) {
    const auto& corpus = ws.corpus();
    std::vector<std::size_t> pos, neg;
    for (auto c : candidates) {
        const auto s = corpus.sentiment(c);
        if (s == SentimentLabel::positive) pos.push_back(c);
        if (s == SentimentLabel::negative) neg.push_back(c);
    }
    std::optional<ContrastPair> best;
    for (auto p : pos) {
        for (auto n : neg) {
            ContrastPair cand{std::min(p, n), std::max(p, n),
                              cosine(ws.embeddings().row(p), ws.embeddings().row(n))};
            if (!best || cand.similarity > best->similarity ||
                (cand.similarity == best->similarity &&
                 std::pair(cand.first, cand.second) < std::pair(best->first, best->second))) {
                best = cand;
            }
        }
    }
    return best;
}

std::optional<ContrastPair> find_contrast_pair(const Workspace& ws, std::string_view topic_id) {
    return find_contrast_pair(ws, ws.topic_members(topic_id));
}

CommentStream order_topic_comments(const Workspace& ws, std::string_view topic_id) {
    const auto members = ws.topic_members(topic_id);
    const auto& corpus = ws.corpus();

    CommentStream stream;
    stream.topic_id = std::string(topic_id);
    stream.pair = find_contrast_pair(ws, members);

    std::deque<std::size_t> pos, neg, neu;
    for (auto c : members) {
        if (stream.pair && (c == stream.pair->first || c == stream.pair->second)) continue;
        switch (corpus.sentiment(c)) {
        case SentimentLabel::positive: pos.push_back(c); break;
        case SentimentLabel::negative: neg.push_back(c); break;
        case SentimentLabel::neutral: neu.push_back(c); break;
        }
    }
    auto by_matches = [&](std::deque<std::size_t>& q) {
        std::vector<std::pair<std::size_t, std::size_t>> keyed;
        for (auto c : q) keyed.emplace_back(ws.keyword_match_count(c, topic_id), c);
        std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        q.clear();
        for (const auto& [_, c] : keyed) q.push_back(c);
    };
    by_matches(pos);
    by_matches(neg);
    by_matches(neu);

    auto& out = stream.comments;
    std::optional<SentimentLabel> last_polar;
    if (stream.pair) {
        out.push_back(stream.pair->first);
        out.push_back(stream.pair->second);
        last_polar = corpus.sentiment(stream.pair->second);
    }
    auto take = [&](std::deque<std::size_t>& q) {
        out.push_back(q.front());
        q.pop_front();
    };
    while (!pos.empty() || !neg.empty() || !neu.empty()) {
        const bool neutral_slot = (out.size() + 1) % 3 == 0;
        if ((neutral_slot && !neu.empty()) || (pos.empty() && neg.empty())) {
            take(neu);
            continue;
        }
        const bool want_negative = last_polar == SentimentLabel::positive;
        if ((want_negative && !neg.empty()) || pos.empty()) {
            take(neg);
            last_polar = SentimentLabel::negative;
        } else {
            take(pos);
            last_polar = SentimentLabel::positive;
        }
    }
    return stream;
}

std::optional<std::size_t> recommend_opposite(const Workspace& ws, const std::unordered_set<std::size_t>& viewed,
                                              std::size_t anchor,
                                              std::optional<std::span<const std::size_t>> scope) {
    const auto& corpus = ws.corpus();
    if (anchor >= corpus.size()) throw NotFound("unknown anchor comment index " + std::to_string(anchor));
    const auto anchor_label = corpus.sentiment(anchor);
    if (anchor_label == SentimentLabel::neutral) return std::nullopt;
    const auto wanted = anchor_label == SentimentLabel::positive ? SentimentLabel::negative : SentimentLabel::positive;

    std::optional<std::size_t> best;
    double best_sim = 0.0;
    auto consider = [&](std::size_t c) {
        if (c == anchor || viewed.count(c) || corpus.sentiment(c) != wanted) return;
        const double sim = cosine(ws.embeddings().row(anchor), ws.embeddings().row(c));
        if (!best || sim > best_sim || (sim == best_sim && c < *best)) {
            best = c;
            best_sim = sim;
        }
    };
    if (scope) {
        for (auto c : *scope) consider(c);
    } else {
        for (std::size_t c = 0; c < corpus.size(); ++c) consider(c);
    }
    return best;
}

std::vector<std::size_t> filter_by_selection(const Workspace& ws, const Selection& selection) {
    return ws.resolve(selection);
}

} // namespace commsense
