#include <gtest/gtest.h>

#include <cmath>

#include "commsense/error.hpp"
#include "commsense/http_providers.hpp"
#include "commsense/providers.hpp"
#include "fixtures.hpp"

using namespace commsense;

TEST(Fnv, KnownVectors) {
    // Published FNV-1a 64-bit test values.
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(HashedEmbedder, UnitLengthAndDeterministic) {
    HashedBagOfWordsEmbedder e(64);
    const auto a = e.embed_one("The breakfast buffet was excellent");
    const auto b = e.embed_one("The breakfast buffet was excellent");
    ASSERT_EQ(a.size(), 64u);
    EXPECT_EQ(a, b);
    EXPECT_NEAR(norm(a), 1.0, 1e-12);
}

TEST(HashedEmbedder, SharedWordsRaiseSimilarity) {
    HashedBagOfWordsEmbedder e;
    const auto a = e.embed_one("rude staff at reception");
    const auto b = e.embed_one("friendly staff at reception");
    const auto c = e.embed_one("cold coffee at breakfast");
    EXPECT_GT(cosine(a, b), cosine(a, c));
}

TEST(HashedEmbedder, StopwordOnlyTextIsZero) {
    HashedBagOfWordsEmbedder e(16);
    const auto v = e.embed_one("the and of");
    EXPECT_EQ(norm(v), 0.0);
}

TEST(HashedEmbedder, BatchMatchesSingle) {
    HashedBagOfWordsEmbedder e(32);
    const std::vector<std::string> texts{"one room", "two rooms"};
    const auto batch = e.embed(texts);
    ASSERT_EQ(batch.size(), 2u);
    EXPECT_EQ(batch[1], e.embed_one("two rooms"));
}

TEST(Lexicon, PolarityAndNegation) {
    LexiconSentiment s;
    EXPECT_EQ(s.classify("The room was excellent."), SentimentLabel::positive);
    EXPECT_EQ(s.classify("The room was dirty."), SentimentLabel::negative);
    EXPECT_EQ(s.classify("The room is on the third floor."), SentimentLabel::neutral);
    EXPECT_EQ(s.classify("The staff was not friendly."), SentimentLabel::negative);
    EXPECT_EQ(s.classify("Never had a bad night."), SentimentLabel::positive);
    EXPECT_EQ(LexiconSentiment::polarity_score("great great awful"), 1);
}

TEST(Lexicon, AgreesWithFixtureGold) {
    LexiconSentiment s;
    std::size_t agree = 0;
    const auto& c = commsense::testing::fixture_corpus();
    for (const auto& cm : c.comments()) agree += s.classify(cm.text) == *cm.gold_sentiment;
    EXPECT_EQ(agree, c.size());
}

TEST(ClassifySentiment, GoldWinsAndEmptyTextFails) {
    LexiconSentiment s;
    Comment c{"a", "Dirty room.", std::nullopt, std::nullopt, std::nullopt, SentimentLabel::positive};
    EXPECT_EQ(classify_sentiment(c, s), SentimentLabel::positive);
    c.gold_sentiment.reset();
    EXPECT_EQ(classify_sentiment(c, s), SentimentLabel::negative);
    EXPECT_THROW(classify_sentiment(std::string_view(""), s), InvalidArgument);
}

TEST(RemoteSentiment, LabelMapping) {
    EXPECT_EQ(RemoteSentimentClient::map_label("positive"), SentimentLabel::positive);
    EXPECT_EQ(RemoteSentimentClient::map_label("LABEL_0"), SentimentLabel::negative);
    EXPECT_EQ(RemoteSentimentClient::map_label("LABEL_1"), SentimentLabel::neutral);
    EXPECT_EQ(RemoteSentimentClient::map_label("Very Negative"), SentimentLabel::negative);
    EXPECT_EQ(RemoteSentimentClient::map_label("NEU"), SentimentLabel::neutral);
}

TEST(BaseUrl, Splits) {
    EXPECT_EQ(split_base_url("https://api.openai.com/v1"), std::make_pair(std::string("https://api.openai.com"), std::string("/v1")));
    EXPECT_EQ(split_base_url("http://127.0.0.1:9000"), std::make_pair(std::string("http://127.0.0.1:9000"), std::string("")));
}
