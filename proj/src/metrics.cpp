#include "omniengine/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "omniengine/stopwords.hpp"
#include "omniengine/words.hpp"

namespace omni {

namespace {

int64_t count_occurrences(std::string_view text, std::string_view needle) {
    if (needle.empty()) return 0;
    int64_t count = 0;
    size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string_view::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

// Sentences are maximal non-empty segments terminated by . ! ? or end of text.
int64_t count_sentences(std::string_view text) {
    int64_t sentences = 0;
    bool has_content = false;
    for (char c : text) {
        if (c == '.' || c == '!' || c == '?') {
            if (has_content) ++sentences;
            has_content = false;
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            has_content = true;
        }
    }
    if (has_content) ++sentences;
    return sentences;
}

}  // namespace

const std::vector<std::string>& default_symbol_markers() {
    static const std::vector<std::string> markers = {"#", "\xe2\x80\xa6", "..."};  // #, …, ...
    return markers;
}

QualityMetrics compute_metrics(const StreamDocument& doc) {
    QualityMetrics m;
    const std::string text = to_text_corpus(doc);
    for (const Element& e : doc.elements) m.image_count += e.tag == ElementTag::Image;

    auto words = split_words(text);
    m.token_length = static_cast<int64_t>(words.size());

    if (!text.empty()) {
        auto lines = split_lines(text);
        m.line_number = static_cast<int64_t>(lines.size());
        m.line_lengths.reserve(lines.size());
        for (auto line : lines) m.line_lengths.push_back(static_cast<int64_t>(split_words(line).size()));
    }

    int64_t non_ws = 0, non_alnum = 0;
    for (unsigned char c : text) {
        if (std::isspace(c)) continue;
        ++non_ws;
        if (!std::isalnum(c)) ++non_alnum;
    }
    if (non_ws > 0) m.non_alpha_fraction = static_cast<double>(non_alnum) / static_cast<double>(non_ws);

    m.sentence_number = count_sentences(text);

    if (words.empty()) {
        m.degenerate = true;
        return m;
    }

    std::unordered_set<std::string> distinct;
    int64_t letters = 0;
    int64_t stop_words = 0;
    for (auto word : words) {
        distinct.insert(lower_copy(word));
        for (unsigned char c : word) letters += std::isalpha(c) ? 1 : 0;
        if (is_stopword(normalize_word(word))) ++stop_words;
    }
    const double n_words = static_cast<double>(words.size());
    m.unique_words_fraction = static_cast<double>(distinct.size()) / n_words;
    m.mean_word_length = static_cast<double>(letters) / n_words;
    m.stop_word_fraction = static_cast<double>(stop_words) / n_words;

    // "…" and "..." never overlap byte-wise, so counting both is safe.
    int64_t symbols = 0;
    for (const auto& marker : default_symbol_markers()) symbols += count_occurrences(text, marker);
    m.symbol_to_word_ratio = static_cast<double>(symbols) / n_words;
    return m;
}

void Histogram::add(double value) {
    if (edges.size() < 2) return;
    size_t bin;
    if (value < edges.front()) {
        bin = 0;  // open-ended underflow
    } else if (value >= edges.back()) {
        bin = counts.size() - 1;  // open-ended overflow
    } else {
        bin = static_cast<size_t>(std::upper_bound(edges.begin(), edges.end(), value) -
                                  edges.begin()) - 1;
        if (bin >= counts.size()) bin = counts.size() - 1;
    }
    ++counts[bin];
    ++total;
}

void Histogram::merge(const Histogram& other) {
    for (size_t i = 0; i < counts.size() && i < other.counts.size(); ++i) counts[i] += other.counts[i];
    total += other.total;
}

std::vector<BinSpec> default_bin_specs() {
    auto linear = [](double lo, double hi, int bins) {
        std::vector<double> edges;
        for (int i = 0; i <= bins; ++i) edges.push_back(lo + (hi - lo) * i / bins);
        return edges;
    };
    return {
        {"line_number", {0, 1, 2, 5, 10, 20, 50, 100, 1000}},
        {"token_length", {0, 50, 100, 200, 400, 800, 1600, 3200, 10000, 100000}},
        {"non_alpha_fraction", linear(0, 1, 10)},
        {"unique_words_fraction", linear(0, 1, 10)},
        {"mean_word_length", {0, 2, 3, 4, 5, 6, 7, 8, 10, 20}},
        {"sentence_number", {0, 1, 2, 5, 10, 20, 50, 100, 1000}},
        {"stop_word_fraction", linear(0, 1, 10)},
        {"symbol_to_word_ratio", {0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0}},
        {"image_count", {0, 1, 2, 3, 4, 5, 10, 20, 100}},
    };
}

MetricsAggregate aggregate_metrics(const std::vector<QualityMetrics>& stream,
                                   const std::vector<BinSpec>& specs) {
    MetricsAggregate agg;
    for (const BinSpec& spec : specs) {
        Histogram h;
        h.metric = spec.metric;
        h.edges = spec.edges;
        h.counts.assign(spec.edges.size() > 1 ? spec.edges.size() - 1 : 0, 0);
        agg.histograms.push_back(std::move(h));
        if (spec.metric == "token_length") agg.token_bucket_edges = spec.edges;
    }
    if (agg.token_bucket_edges.empty()) agg.token_bucket_edges = {0, 100, 1000, 100000};

    auto value_of = [](const QualityMetrics& m, const std::string& name) -> double {
        if (name == "line_number") return static_cast<double>(m.line_number);
        if (name == "token_length") return static_cast<double>(m.token_length);
        if (name == "non_alpha_fraction") return m.non_alpha_fraction;
        if (name == "unique_words_fraction") return m.unique_words_fraction;
        if (name == "mean_word_length") return m.mean_word_length;
        if (name == "sentence_number") return static_cast<double>(m.sentence_number);
        if (name == "stop_word_fraction") return m.stop_word_fraction;
        if (name == "symbol_to_word_ratio") return m.symbol_to_word_ratio;
        if (name == "image_count") return static_cast<double>(m.image_count);
        return 0.0;
    };

    for (const QualityMetrics& m : stream) {
        ++agg.documents;
        for (Histogram& h : agg.histograms) h.add(value_of(m, h.metric));
        const auto& edges = agg.token_bucket_edges;
        double v = static_cast<double>(m.token_length);
        int64_t bucket;
        if (v < edges.front()) {
            bucket = 0;
        } else if (v >= edges.back()) {
            bucket = static_cast<int64_t>(edges.size()) - 2;
        } else {
            bucket = std::upper_bound(edges.begin(), edges.end(), v) - edges.begin() - 1;
        }
        ++agg.image_token_joint[{m.image_count, bucket}];
    }
    return agg;
}

void MetricsAggregate::merge(const MetricsAggregate& other) {
    documents += other.documents;
    for (size_t i = 0; i < histograms.size() && i < other.histograms.size(); ++i) {
        histograms[i].merge(other.histograms[i]);
    }
    for (const auto& [key, count] : other.image_token_joint) image_token_joint[key] += count;
}

std::string histograms_to_tsv(const MetricsAggregate& agg) {
    std::ostringstream out;
    out << "metric\tbin_lo\tbin_hi\tcount\n";
    for (const Histogram& h : agg.histograms) {
        for (size_t i = 0; i < h.counts.size(); ++i) {
            out << h.metric << '\t' << h.edges[i] << '\t' << h.edges[i + 1] << '\t' << h.counts[i]
                << '\n';
        }
    }
    return out.str();
}

std::string joint_table_to_json(const MetricsAggregate& agg) {
    nlohmann::ordered_json j;
    j["documents"] = agg.documents;
    j["token_bucket_edges"] = agg.token_bucket_edges;
    nlohmann::ordered_json cells = nlohmann::ordered_json::array();
    for (const auto& [key, count] : agg.image_token_joint) {
        nlohmann::ordered_json cell;
        cell["images"] = key.first;
        cell["token_bucket"] = key.second;
        cell["count"] = count;
        cells.push_back(std::move(cell));
    }
    j["cells"] = std::move(cells);
    return j.dump();
}

}  // namespace omni
