#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "commsense/error.hpp"
#include "commsense/navigation.hpp"
#include "fixtures.hpp"

using namespace commsense;
using namespace commsense::testing;

namespace {

// 50 comments on "pool" with seeded random embeddings; comments 17 (positive)
// and 38 (negative) share a near-identical vector.
std::vector<SyntheticComment> planted(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0, 1);
    std::vector<SyntheticComment> out;
    for (int i = 0; i < 50; ++i) {
        Vector v(16);
        for (auto& x : v) x = g(rng);
        normalize(v);
        const auto label = i % 3 == 0 ? SentimentLabel::positive
                           : i % 3 == 1 ? SentimentLabel::negative : SentimentLabel::neutral;
        out.push_back({"Note " + std::to_string(i) + " on the pool.", label, v});
    }
    out[17].sentiment = SentimentLabel::positive;
    out[38].sentiment = SentimentLabel::negative;
    out[38].embedding = out[17].embedding;
    out[38].embedding[0] += 0.01;
    normalize(out[38].embedding);
    return out;
}

ContrastPair brute_pair(const std::vector<SyntheticComment>& cs) {
    ContrastPair best{0, 0, -2.0};
    for (std::size_t i = 0; i < cs.size(); ++i)
        for (std::size_t j = i + 1; j < cs.size(); ++j) {
            const auto a = cs[i].sentiment, b = cs[j].sentiment;
            const bool opposite = (a == SentimentLabel::positive && b == SentimentLabel::negative) ||
                                  (a == SentimentLabel::negative && b == SentimentLabel::positive);
            if (!opposite) continue;
            double d = 0, na = 0, nb = 0;
            for (std::size_t k = 0; k < cs[i].embedding.size(); ++k) {
                d += cs[i].embedding[k] * cs[j].embedding[k];
                na += cs[i].embedding[k] * cs[i].embedding[k];
                nb += cs[j].embedding[k] * cs[j].embedding[k];
            }
            const double sim = d / std::sqrt(na * nb);
            if (sim > best.similarity) best = {i, j, sim};
        }
    return best;
}

} // namespace

TEST(ContrastPair, PlantedPairWins) {
    const auto cs = planted(5);
    const auto ws = synthetic_workspace(cs, {{"Pool", {"pool"}}});
    const auto pair = find_contrast_pair(*ws, "t1");
    ASSERT_TRUE(pair);
    EXPECT_EQ(pair->first, 17u);
    EXPECT_EQ(pair->second, 38u);
}

TEST(ContrastPair, MatchesBruteForceOnRandomTopics) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto cs = planted(seed);
        // Remove the plant so the argmax is whatever the random draw gives.
        std::mt19937_64 rng(seed * 31);
        std::normal_distribution<double> g(0, 1);
        for (auto& x : cs[38].embedding) x = g(rng);
        const auto ws = synthetic_workspace(cs, {{"Pool", {"pool"}}});
        const auto pair = find_contrast_pair(*ws, "t1");
        const auto expected = brute_pair(cs);
        ASSERT_TRUE(pair);
        EXPECT_EQ(pair->first, expected.first) << seed;
        EXPECT_EQ(pair->second, expected.second) << seed;
        EXPECT_NEAR(pair->similarity, expected.similarity, 1e-12);
    }
}

TEST(ContrastPair, NoneWithoutBothPolarities) {
    const auto ws = synthetic_workspace(labelled_block("pool", 4, 2, 0), {{"Pool", {"pool"}}});
    EXPECT_FALSE(find_contrast_pair(*ws, "t1"));
    EXPECT_THROW(find_contrast_pair(*ws, "t9"), NotFound);
}

TEST(ContrastPair, TieGoesToLowestIndices) {
    std::vector<SyntheticComment> cs;
    for (int i = 0; i < 4; ++i)
        cs.push_back({"Same pool.", i % 2 ? SentimentLabel::negative : SentimentLabel::positive, {1.0, 0.0}});
    const auto ws = synthetic_workspace(cs, {{"Pool", {"pool"}}});
    const auto pair = find_contrast_pair(*ws, "t1");
    ASSERT_TRUE(pair);
    EXPECT_EQ(pair->first, 0u);
    EXPECT_EQ(pair->second, 1u);
}

TEST(Stream, OrderingRules) {
    const auto cs = planted(9);
    const auto ws = synthetic_workspace(cs, {{"Pool", {"pool"}}});
    const auto stream = order_topic_comments(*ws, "t1");
    ASSERT_TRUE(stream.pair);
    ASSERT_EQ(stream.comments.size(), 50u);
    EXPECT_EQ(stream.comments[0], stream.pair->first);
    EXPECT_EQ(stream.comments[1], stream.pair->second);
    EXPECT_EQ(std::set(stream.comments.begin(), stream.comments.end()).size(), 50u);

    const auto& corpus = ws->corpus();
    std::size_t neutrals_left = 0;
    for (auto c : stream.comments) neutrals_left += corpus.sentiment(c) == SentimentLabel::neutral;
    std::optional<SentimentLabel> last;
    std::size_t pos_left = 0, neg_left = 0;
    for (std::size_t i = 2; i < 50; ++i) {
        const auto s = corpus.sentiment(stream.comments[i]);
        pos_left += s == SentimentLabel::positive;
        neg_left += s == SentimentLabel::negative;
    }
    for (std::size_t i = 0; i < stream.comments.size(); ++i) {
        const auto s = corpus.sentiment(stream.comments[i]);
        if (i >= 2) {
            if ((i + 1) % 3 == 0 && neutrals_left > 0) {
                EXPECT_EQ(s, SentimentLabel::neutral) << i;
            }
            if (s != SentimentLabel::neutral && last && pos_left > 0 && neg_left > 0) {
                EXPECT_NE(s, *last) << i;
            }
            if (s == SentimentLabel::positive) --pos_left;
            if (s == SentimentLabel::negative) --neg_left;
        }
        if (s == SentimentLabel::neutral) --neutrals_left;
        else last = s;
    }
}

TEST(Stream, KeywordMatchCountBreaksOrder) {
    std::vector<SyntheticComment> cs{
        {"A pool.", SentimentLabel::positive, {1, 0, 0}},
        {"Pool, pool, pools.", SentimentLabel::positive, {0, 1, 0}},
        {"One pool.", SentimentLabel::positive, {0, 0, 1}},
    };
    const auto ws = synthetic_workspace(cs, {{"Pool", {"pool"}}});
    const auto stream = order_topic_comments(*ws, "t1");
    EXPECT_FALSE(stream.pair);
    EXPECT_EQ(stream.comments, (std::vector<std::size_t>{1, 0, 2}));
}

TEST(Recommend, MostSimilarUnviewedOpposite) {
    const auto cs = planted(13);
    const auto ws = synthetic_workspace(cs, {{"Pool", {"pool"}}});
    const auto& corpus = ws->corpus();
    std::unordered_set<std::size_t> viewed;
    for (std::size_t anchor = 0; anchor < 50; ++anchor) {
        const auto got = recommend_opposite(*ws, viewed, anchor);
        const auto s = corpus.sentiment(anchor);
        if (s == SentimentLabel::neutral) {
            EXPECT_FALSE(got);
            continue;
        }
        std::optional<std::size_t> best;
        double best_sim = -2;
        for (std::size_t c = 0; c < 50; ++c) {
            const auto t = corpus.sentiment(c);
            if (t == s || t == SentimentLabel::neutral || viewed.count(c)) continue;
            const double sim = cosine(cs[anchor].embedding, cs[c].embedding);
            if (sim > best_sim) best_sim = sim, best = c;
        }
        EXPECT_EQ(got, best) << anchor;
        if (got) viewed.insert(*got);  // follow the recommendation
    }
    EXPECT_THROW(recommend_opposite(*ws, viewed, 50), NotFound);
}

TEST(Recommend, ScopeAndExhaustion) {
    const auto ws = synthetic_workspace(labelled_block("pool", 2, 0, 2), {{"Pool", {"pool"}}});
    const std::vector<std::size_t> scope{0, 1, 3};
    EXPECT_EQ(recommend_opposite(*ws, {}, 0, scope), std::optional<std::size_t>(3));
    EXPECT_FALSE(recommend_opposite(*ws, {2, 3}, 0));
}

TEST(Selection, FilterMatchesIndices) {
    const auto ws = fixture_workspace();
    EXPECT_EQ(filter_by_selection(*ws, Selection::all()).size(), 574u);
    const auto& t = ws->scheme().topics.front();
    const auto members = filter_by_selection(*ws, Selection::topic(t.topic_id));
    std::set<std::size_t> expected;
    for (const auto& kw : t.keywords)
        for (const auto& s : ws->spans().at(kw)) expected.insert(s.comment);
    EXPECT_EQ(members, std::vector<std::size_t>(expected.begin(), expected.end()));
    const auto kw = filter_by_selection(*ws, Selection::keyword(t.keywords.front()));
    EXPECT_TRUE(std::includes(members.begin(), members.end(), kw.begin(), kw.end()));
    EXPECT_THROW(filter_by_selection(*ws, Selection::topic("t99")), NotFound);
    EXPECT_THROW(filter_by_selection(*ws, Selection::keyword("zzz")), NotFound);
}
