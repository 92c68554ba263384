#include "commsense/text.hpp"

#include <algorithm>
#include <array>

namespace commsense::text {

namespace {

bool is_word_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

// Sorted for binary search.
constexpr std::array<std::string_view, 127> kStopwords = {
    "a",       "about",   "above",  "after",   "again",  "against", "all",    "also",
    "am",      "an",      "and",    "any",     "are",    "as",      "at",     "be",
    "because", "been",    "before", "being",   "below",  "between", "both",   "but",
    "by",      "can",     "could",  "did",     "do",     "does",    "doing",  "down",
    "during",  "each",    "even",   "ever",    "every",  "few",     "for",    "from",
    "further", "had",     "has",    "have",    "having", "he",      "her",    "here",
    "hers",    "him",     "his",    "how",     "i",      "if",      "in",     "into",
    "is",      "it",      "its",    "just",    "me",     "more",    "most",   "much",
    "my",      "no",      "nor",    "not",     "now",    "of",      "off",    "on",
    "once",    "only",    "or",     "other",   "our",    "ours",    "out",    "over",
    "own",     "quite",   "really", "same",    "she",    "should",  "so",     "some",
    "still",   "such",    "than",   "that",    "the",    "their",   "them",   "then",
    "there",   "these",   "they",   "this",    "those",  "through", "to",     "too",
    "under",   "until",   "up",     "us",      "very",   "was",     "we",     "were",
    "what",    "when",    "where",  "which",   "while",  "who",     "whom",   "why",
    "will",    "with",    "would",  "you",     "your",   "yours",   "yourself",
};

} // namespace

std::string lowercase(std::string_view s) {
    std::string out(s);
    for (auto& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        if (!is_word_byte(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n) {
            auto c = static_cast<unsigned char>(text[j]);
            if (is_word_byte(c)) {
                ++j;
            } else if (c == '\'' && j + 1 < n && is_word_byte(static_cast<unsigned char>(text[j + 1]))) {
                j += 2;
            } else {
                break;
            }
        }
        tokens.push_back({lowercase(text.substr(i, j - i)), i, j});
        i = j;
    }
    return tokens;
}

bool is_stopword(std::string_view word) {
    return std::binary_search(kStopwords.begin(), kStopwords.end(), word);
}

std::string stem(std::string_view word) {
    std::string w = lowercase(word);
    auto ends_with = [&](std::string_view suf) {
        return w.size() > suf.size() + 2 && w.compare(w.size() - suf.size(), suf.size(), suf) == 0;
    };
    if (ends_with("ies")) {
        w.replace(w.size() - 3, 3, "y");
    } else if (ends_with("sses")) {
        w.resize(w.size() - 2);
    } else if (ends_with("s") && !ends_with("ss") && !ends_with("us") && !ends_with("is")) {
        w.pop_back();
    }
    return w;
}

std::vector<std::string> candidate_phrases(std::string_view text) {
    auto tokens = tokenize(text);
    std::vector<std::string> out;
    const Token* prev = nullptr;
    for (const auto& t : tokens) {
        const bool stop = is_stopword(t.norm) || t.norm.size() < 2 ||
                          std::all_of(t.norm.begin(), t.norm.end(),
                                      [](char c) { return c >= '0' && c <= '9'; });
        if (stop) {
            prev = nullptr;
            continue;
        }
        out.push_back(t.norm);
        // Adjacent means only whitespace between the two tokens.
        if (prev != nullptr) {
            auto gap = text.substr(prev->end, t.begin - prev->end);
            if (gap.find_first_not_of(" \t") == std::string_view::npos) {
                out.push_back(prev->norm + " " + t.norm);
            }
        }
        prev = &t;
    }
    return out;
}

} // namespace commsense::text
