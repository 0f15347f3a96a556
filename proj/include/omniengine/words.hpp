#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace omni {

// A word is a maximal run of non-whitespace. All quality statistics in this
// project share this definition.
inline std::vector<std::string_view> split_words(std::string_view text) {
    std::vector<std::string_view> words;
    size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) words.push_back(text.substr(start, i - start));
    }
    return words;
}

inline std::string lower_copy(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Word with leading/trailing ASCII punctuation stripped, lowercased. Used for
// stop-word and keyword matching ("The," matches "the").
inline std::string normalize_word(std::string_view word) {
    size_t begin = 0, end = word.size();
    while (begin < end && !std::isalnum(static_cast<unsigned char>(word[begin]))) ++begin;
    while (end > begin && !std::isalnum(static_cast<unsigned char>(word[end - 1]))) --end;
    return lower_copy(word.substr(begin, end - begin));
}

inline std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    size_t start = 0;
    for (size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == '\n') {
            lines.push_back(text.substr(start, i - start));
            start = i + 1;
        }
    }
    return lines;
}

}  // namespace omni
