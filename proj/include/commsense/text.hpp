#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace commsense::text {

struct Token {
    std::string norm;   // ASCII-lowercased
    std::size_t begin;  // byte offsets into the source text
    std::size_t end;
};

// Word tokens: maximal runs of ASCII letters/digits, apostrophes inside a
// word, and any non-ASCII byte (so UTF-8 sequences stay inside words).
std::vector<Token> tokenize(std::string_view text);

std::string lowercase(std::string_view s);
bool is_stopword(std::string_view word);

// Light suffix stripping used for keyword/span matching:
// "rooms" -> "room", "cleanliness" keeps its own stem but starts with "clean".
std::string stem(std::string_view word);

// Unigram and bigram candidates after stopword removal. Bigrams only join
// tokens that are adjacent in the original text.
std::vector<std::string> candidate_phrases(std::string_view text);

} // namespace commsense::text
