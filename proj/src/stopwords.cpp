#include "omniengine/stopwords.hpp"

namespace omni {

const std::vector<std::string>& english_stopwords() {
    static const std::vector<std::string> words = {
        "a", "about", "above", "across", "after", "again", "against", "all",
        "along", "also", "although", "am", "among", "an", "and", "any",
        "are", "around", "as", "at", "be", "because", "been", "before",
        "behind", "being", "below", "beside", "between", "beyond", "both", "but",
        "by", "can", "cannot", "could", "despite", "did", "do", "does",
        "doing", "down", "during", "each", "except", "few", "for", "from",
        "further", "had", "has", "have", "having", "he", "her", "here",
        "hers", "herself", "him", "himself", "his", "how", "however", "i",
        "if", "in", "inside", "into", "is", "it", "its", "itself",
        "just", "may", "me", "might", "more", "most", "must", "my",
        "myself", "near", "no", "nor", "not", "now", "of", "off",
        "on", "once", "only", "or", "other", "our", "ours", "ourselves",
        "out", "over", "own", "same", "shall", "she", "should", "since",
        "so", "some", "such", "than", "that", "the", "their", "theirs",
        "them", "themselves", "then", "there", "these", "they", "this", "those",
        "through", "to", "too", "under", "until", "up", "upon", "very",
        "was", "we", "were", "what", "when", "where", "which", "while",
        "who", "whom", "why", "will", "with", "within", "without", "would",
        "yet", "you", "your", "yours", "yourself", "yourselves",
    };
    return words;
}

bool is_stopword(std::string_view lowercase_word) {
    static const std::unordered_set<std::string_view> index(english_stopwords().begin(),
                                                            english_stopwords().end());
    return index.count(lowercase_word) > 0;
}

}  // namespace omni
