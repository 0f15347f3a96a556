#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace omni {

// The frozen 150-entry English stop-word list. Quality fractions computed
// against it are part of this project's contract, so the list is versioned
// data: edits change corpus statistics and must bump kStopwordListVersion.
inline constexpr int kStopwordListVersion = 1;

const std::vector<std::string>& english_stopwords();

bool is_stopword(std::string_view lowercase_word);

}  // namespace omni
