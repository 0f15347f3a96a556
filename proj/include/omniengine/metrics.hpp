#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "omniengine/stream_format.hpp"

namespace omni {

// Per-document quality statistics computed over the pure-text view of a
// document. token_length counts whitespace words, not model tokens; reports
// label it "word-token length" accordingly.
struct QualityMetrics {
    int64_t line_number = 0;
    std::vector<int64_t> line_lengths;  // words per line
    int64_t token_length = 0;           // total word count
    double non_alpha_fraction = 0.0;    // non-alphanumeric / non-whitespace chars
    double unique_words_fraction = 0.0;
    double mean_word_length = 0.0;  // letters per word
    int64_t sentence_number = 0;
    double stop_word_fraction = 0.0;
    double symbol_to_word_ratio = 0.0;
    int64_t image_count = 0;
    // Set when the document has zero words; all word-denominated fields are 0.
    bool degenerate = false;
};

// Symbols counted by symbol_to_word_ratio (configurable in reports).
const std::vector<std::string>& default_symbol_markers();  // {"#", "…", "..."}

QualityMetrics compute_metrics(const StreamDocument& doc);

struct Histogram {
    std::string metric;
    std::vector<double> edges;    // ascending; bins are [e_i, e_{i+1}), boundary bins open-ended
    std::vector<int64_t> counts;  // size = edges.size() - 1
    int64_t total = 0;

    void add(double value);
    void merge(const Histogram& other);
};

struct BinSpec {
    std::string metric;
    std::vector<double> edges;
};

struct MetricsAggregate {
    std::vector<Histogram> histograms;
    // Sparse joint distribution: (image_count, token-length bucket index) -> count.
    std::map<std::pair<int64_t, int64_t>, int64_t> image_token_joint;
    std::vector<double> token_bucket_edges;
    int64_t documents = 0;

    void merge(const MetricsAggregate& other);
};

// Default bin edges for the nine metrics plus the joint token buckets.
std::vector<BinSpec> default_bin_specs();

MetricsAggregate aggregate_metrics(const std::vector<QualityMetrics>& stream,
                                   const std::vector<BinSpec>& specs);

// TSV rendering (one histogram per block) and JSON for the joint table.
std::string histograms_to_tsv(const MetricsAggregate& agg);
std::string joint_table_to_json(const MetricsAggregate& agg);

}  // namespace omni
