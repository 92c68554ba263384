#include "commsense/providers.hpp"

#include <algorithm>

#include "commsense/error.hpp"
#include "commsense/text.hpp"

namespace commsense {

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

HashedBagOfWordsEmbedder::HashedBagOfWordsEmbedder(std::size_t dim) : dim_(dim) {
    if (dim_ < 2) throw InvalidArgument("embedding dimension must be at least 2");
}

Vector HashedBagOfWordsEmbedder::embed_one(std::string_view text) const {
    Vector v(dim_, 0.0);
    for (const auto& feature : text::candidate_phrases(text)) {
        const auto h = fnv1a64(feature);
        const double sign = (h >> 63) != 0 ? -1.0 : 1.0;
        v[static_cast<std::size_t>(h % dim_)] += sign;
    }
    normalize(v);
    return v;
}

std::vector<Vector> HashedBagOfWordsEmbedder::embed(std::span<const std::string> texts) {
    std::vector<Vector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed_one(t));
    return out;
}

namespace {

constexpr std::string_view kPositive[] = {
    "amazing",   "attentive", "beautiful", "best",       "brilliant", "bright",    "charming",
    "cheerful",  "clean",     "comfortable", "convenient", "courteous", "cozy",     "delicious",
    "delightful", "elegant",  "enjoyed",   "excellent",  "exceptional", "fabulous", "fantastic",
    "fine",      "fresh",     "friendly",  "generous",   "good",      "gorgeous",  "great",
    "happy",     "helpful",   "impressive", "kind",      "love",      "loved",     "lovely",
    "marvelous", "modern",    "nice",      "outstanding", "perfect",  "pleasant",  "polite",
    "quiet",     "recommend", "relaxing",  "reliable",   "roomy",     "satisfied", "spacious",
    "splendid",  "spotless",  "stunning",  "stylish",    "superb",    "tasty",     "terrific",
    "thoughtful", "tidy",     "top",       "warm",       "welcoming", "wonderful", "worth",
    "affordable", "awesome",  "calm",      "central",    "cheap",     "efficient", "favourite",
    "favorite",  "gracious",  "smooth",
};

constexpr std::string_view kNegative[] = {
    "annoying",  "awful",     "bad",       "bland",      "broken",    "careless",  "chaotic",
    "cold",      "complain",  "cramped",   "dated",      "dirty",     "disappointed", "disappointing",
    "disgusting", "disorganized", "dreadful", "expensive", "faulty",  "filthy",    "greasy",
    "grimy",     "hate",      "hated",     "horrible",   "inadequate", "lousy",    "mediocre",
    "mess",      "messy",     "moldy",     "musty",      "nasty",     "noise",     "noisy",
    "old",       "overpriced", "poor",     "problem",    "rude",      "shabby",    "sloppy",
    "slow",      "small",     "smell",     "smelly",     "stained",   "stale",     "terrible",
    "tiny",      "uncomfortable", "unfriendly", "unhelpful", "unpleasant", "unprofessional",
    "worn",      "worse",     "worst",     "avoid",      "bugs",      "cockroach", "damp",
    "dusty",     "leaking",   "loud",      "rusty",      "scam",      "sticky",    "ugly",
    "waste",     "weak",      "wrong",
};

constexpr std::string_view kNegators[] = {
    "never", "no", "not", "nothing", "hardly", "barely", "without", "isn't",
};

bool contains(std::span<const std::string_view> list, std::string_view w) {
    return std::find(list.begin(), list.end(), w) != list.end();
}

bool is_negator(std::string_view w) {
    if (contains(kNegators, w)) return true;
    return w.size() > 3 && w.substr(w.size() - 3) == "n't";
}

} // namespace

int LexiconSentiment::word_polarity(std::string_view w) {
    if (contains(kPositive, w)) return 1;
    if (contains(kNegative, w)) return -1;
    return 0;
}

int LexiconSentiment::polarity_score(std::string_view text) {
    const auto tokens = text::tokenize(text);
    int score = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        int p = word_polarity(tokens[i].norm);
        if (p == 0) continue;
        for (std::size_t back = 1; back <= 3 && back <= i; ++back) {
            if (is_negator(tokens[i - back].norm)) {
                p = -p;
                break;
            }
        }
        score += p;
    }
    return score;
}

SentimentLabel LexiconSentiment::classify(std::string_view text) {
    const int s = polarity_score(text);
    if (s > 0) return SentimentLabel::positive;
    if (s < 0) return SentimentLabel::negative;
    return SentimentLabel::neutral;
}

SentimentLabel classify_sentiment(std::string_view text, SentimentProvider& provider) {
    if (text.empty()) throw InvalidArgument("cannot classify empty text");
    return provider.classify(text);
}

SentimentLabel classify_sentiment(const Comment& comment, SentimentProvider& provider) {
    if (comment.gold_sentiment) return *comment.gold_sentiment;
    return classify_sentiment(comment.text, provider);
}

} // namespace commsense
