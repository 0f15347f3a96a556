#include "omniengine/text_filters.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "omniengine/hash.hpp"
#include "omniengine/metrics.hpp"
#include "omniengine/stopwords.hpp"
#include "omniengine/words.hpp"

namespace omni {

namespace {

std::string lower(std::string_view s) { return lower_copy(s); }

bool contains_ci(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) return false;
    std::string h = lower(haystack), n = lower(needle);
    return h.find(n) != std::string::npos;
}

}  // namespace

// --- preliminary_filter --------------------------------------------------------

FilterVerdict preliminary_filter(const StreamDocument& doc, const PreliminaryConfig& config) {
    const std::string text = to_text_corpus(doc);
    const auto words = split_words(text);
    const int64_t n_words = static_cast<int64_t>(words.size());

    FilterVerdict verdict;
    auto fire = [&](const char* check) { verdict.triggered_rules.emplace_back(check); };

    if (n_words < config.min_words) fire("too_short");
    if (n_words > config.max_words) fire("too_long");

    int64_t letters = 0;
    std::unordered_set<std::string> distinct_stopwords;
    std::unordered_map<std::string, int64_t> word_counts;
    int64_t top_count = 0;
    for (auto word : words) {
        for (unsigned char c : word) letters += std::isalpha(c) ? 1 : 0;
        std::string norm = normalize_word(word);
        if (norm.empty()) continue;
        if (is_stopword(norm)) distinct_stopwords.insert(norm);
        top_count = std::max(top_count, ++word_counts[norm]);
    }
    if (n_words > 0) {
        double mean_length = static_cast<double>(letters) / static_cast<double>(n_words);
        if (mean_length < config.min_mean_word_length || mean_length > config.max_mean_word_length)
            fire("mean_word_length");

        int64_t symbols = 0;
        for (const auto& marker : default_symbol_markers()) {
            size_t pos = 0;
            while ((pos = text.find(marker, pos)) != std::string::npos) {
                ++symbols;
                pos += marker.size();
            }
        }
        if (static_cast<double>(symbols) / static_cast<double>(n_words) > config.max_symbol_ratio)
            fire("symbol_ratio");
    }

    if (static_cast<int>(distinct_stopwords.size()) < config.min_distinct_stopwords)
        fire("few_stopwords");

    if (contains_ci(text, "lorem ipsum")) fire("lorem_ipsum");

    int blank_run = 0, max_blank_run = 0;
    for (auto line : split_lines(text)) {
        bool blank = std::all_of(line.begin(), line.end(),
                                 [](unsigned char c) { return std::isspace(c); });
        blank_run = blank ? blank_run + 1 : 0;
        max_blank_run = std::max(max_blank_run, blank_run);
    }
    if (max_blank_run > config.max_consecutive_blank_lines) fire("blank_lines");

    if (n_words > 0 &&
        static_cast<double>(top_count) / static_cast<double>(n_words) > config.max_top_word_fraction)
        fire("top_word");

    int64_t non_ws = 0, digits = 0;
    for (unsigned char c : text) {
        if (std::isspace(c)) continue;
        ++non_ws;
        digits += std::isdigit(c) ? 1 : 0;
    }
    if (non_ws > 0 &&
        static_cast<double>(digits) / static_cast<double>(non_ws) > config.max_digit_fraction)
        fire("digit_heavy");

    if (!verdict.triggered_rules.empty()) {
        verdict.decision = FilterDecision::Drop;
        verdict.drop_reason = verdict.triggered_rules.front();
    }
    return verdict;
}

// --- Rule predicates -------------------------------------------------------------

namespace {

struct ParagraphContext {
    // Original element index of this paragraph, and access to removal marks
    // so adjacency-sensitive rules can see earlier deletions.
    size_t element_index;
    const std::vector<Element>* elements;
    const std::vector<bool>* removed;
};

// A paragraph transform returns the new content, or nullopt to delete the
// paragraph. Returning the input unchanged means the rule did not fire.
using ParagraphFn = std::optional<std::string> (*)(const std::string&, const FilterRule&,
                                                   const ParagraphContext&);
using VerdictFn = bool (*)(const StreamDocument&, const FilterRule&);

std::optional<std::string> collapse_newlines(const std::string& text, const FilterRule&,
                                             const ParagraphContext&) {
    std::string out;
    out.reserve(text.size());
    int run = 0;
    for (char c : text) {
        if (c == '\n') {
            if (++run <= 2) out += c;
        } else {
            run = 0;
            out += c;
        }
    }
    return out;
}

std::optional<std::string> strip_urls(const std::string& text, const FilterRule&,
                                      const ParagraphContext&) {
    auto words = split_words(text);
    bool any_url = false;
    std::string out;
    for (auto word : words) {
        std::string w = lower(word);
        bool url = w.rfind("http://", 0) == 0 || w.rfind("https://", 0) == 0 ||
                   w.rfind("www.", 0) == 0;
        if (url) {
            any_url = true;
            continue;
        }
        if (!out.empty()) out += ' ';
        out += word;
    }
    if (!any_url) return text;  // untouched: whitespace is preserved
    if (out.empty()) return std::nullopt;
    return out;
}

std::optional<std::string> keyword_paragraph(const std::string& text, const FilterRule& rule,
                                             const ParagraphContext&) {
    for (const auto& keyword : toml::get_string_array(rule.params, "keywords")) {
        if (contains_ci(text, keyword)) return std::nullopt;
    }
    return text;
}

std::optional<std::string> single_word_paragraph(const std::string& text, const FilterRule&,
                                                 const ParagraphContext&) {
    if (split_words(text).size() == 1) return std::nullopt;
    return text;
}

std::optional<std::string> high_digit_paragraph(const std::string& text, const FilterRule& rule,
                                                const ParagraphContext&) {
    double max_fraction = toml::get_float(rule.params, "max_digit_fraction", 0.5);
    int64_t non_ws = 0, digits = 0;
    for (unsigned char c : text) {
        if (std::isspace(c)) continue;
        ++non_ws;
        digits += std::isdigit(c) ? 1 : 0;
    }
    if (non_ws > 0 && static_cast<double>(digits) / static_cast<double>(non_ws) > max_fraction)
        return std::nullopt;
    return text;
}

std::optional<std::string> suffix_paragraph(const std::string& text, const FilterRule& rule,
                                            const ParagraphContext&) {
    std::string trimmed = text;
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back())))
        trimmed.pop_back();
    std::string low = lower(trimmed);
    for (const auto& suffix : toml::get_string_array(rule.params, "suffixes")) {
        std::string s = lower(suffix);
        if (low.size() >= s.size() && low.compare(low.size() - s.size(), s.size(), s) == 0)
            return std::nullopt;
    }
    return text;
}

std::optional<std::string> uppercase_heavy(const std::string& text, const FilterRule& rule,
                                           const ParagraphContext&) {
    double max_fraction = toml::get_float(rule.params, "max_upper_fraction", 0.5);
    int64_t min_letters = toml::get_int(rule.params, "min_letters", 20);
    int64_t letters = 0, upper = 0;
    for (unsigned char c : text) {
        if (std::isalpha(c)) {
            ++letters;
            upper += std::isupper(c) ? 1 : 0;
        }
    }
    if (letters >= min_letters &&
        static_cast<double>(upper) / static_cast<double>(letters) > max_fraction)
        return std::nullopt;
    return text;
}

std::optional<std::string> short_paragraph_adjacent(const std::string& text, const FilterRule& rule,
                                                    const ParagraphContext& ctx) {
    int64_t min_words = toml::get_int(rule.params, "min_words", 3);
    if (static_cast<int64_t>(split_words(text).size()) >= min_words) return text;
    auto neighbor_removed = [&](size_t index) {
        return index < ctx.elements->size() && (*ctx.elements)[index].tag == ElementTag::Text &&
               (*ctx.removed)[index];
    };
    bool adjacent = (ctx.element_index > 0 && neighbor_removed(ctx.element_index - 1)) ||
                    neighbor_removed(ctx.element_index + 1);
    if (adjacent) return std::nullopt;
    return text;
}

bool doc_few_stopwords(const StreamDocument& doc, const FilterRule& rule) {
    double min_fraction = toml::get_float(rule.params, "min_fraction", 0.04);
    const std::string text = to_text_corpus(doc);
    auto words = split_words(text);
    if (words.empty()) return true;
    int64_t stop = 0;
    for (auto word : words) stop += is_stopword(normalize_word(word)) ? 1 : 0;
    return static_cast<double>(stop) / static_cast<double>(words.size()) < min_fraction;
}

bool doc_nonletter_words(const StreamDocument& doc, const FilterRule& rule) {
    double max_fraction = toml::get_float(rule.params, "max_fraction", 0.3);
    const std::string text = to_text_corpus(doc);
    auto words = split_words(text);
    if (words.empty()) return false;
    int64_t nonletter = 0;
    for (auto word : words) {
        bool has_letter = std::any_of(word.begin(), word.end(),
                                      [](unsigned char c) { return std::isalpha(c); });
        nonletter += has_letter ? 0 : 1;
    }
    return static_cast<double>(nonletter) / static_cast<double>(words.size()) > max_fraction;
}

bool meta_threshold(const StreamDocument& doc, const FilterRule& rule) {
    std::string field = toml::get_string(rule.params, "field", "");
    double value = kUnscored;
    if (field == "nsfw_text") value = doc.meta.nsfw_text;
    else if (field == "political") value = doc.meta.political;
    else if (field == "toxic") value = doc.meta.toxic;
    else if (field == "advertisement") value = doc.meta.advertisement;
    else if (field == "fluency") value = doc.meta.fluency;
    if (value == kUnscored) return false;  // unscored skips the check
    if (const toml::Value* max = toml::find(rule.params, "max")) {
        if (value > max->as_float()) return true;
    }
    if (const toml::Value* min = toml::find(rule.params, "min")) {
        if (value < min->as_float()) return true;
    }
    return false;
}

struct RuleType {
    RuleKind kind;
    ParagraphFn paragraph = nullptr;
    VerdictFn verdict = nullptr;
    std::vector<std::string> allowed_params;
};

const std::map<std::string, RuleType>& rule_types() {
    static const std::map<std::string, RuleType> types = {
        {"collapse_newlines", {RuleKind::ParagraphTransform, collapse_newlines, nullptr, {}}},
        {"strip_urls", {RuleKind::ParagraphTransform, strip_urls, nullptr, {}}},
        {"keyword_paragraph",
         {RuleKind::ParagraphTransform, keyword_paragraph, nullptr, {"keywords"}}},
        {"single_word_paragraph", {RuleKind::ParagraphTransform, single_word_paragraph, nullptr, {}}},
        {"high_digit_paragraph",
         {RuleKind::ParagraphTransform, high_digit_paragraph, nullptr, {"max_digit_fraction"}}},
        {"suffix_paragraph", {RuleKind::ParagraphTransform, suffix_paragraph, nullptr, {"suffixes"}}},
        {"uppercase_heavy",
         {RuleKind::ParagraphTransform, uppercase_heavy, nullptr, {"max_upper_fraction", "min_letters"}}},
        {"short_paragraph_adjacent",
         {RuleKind::ParagraphTransform, short_paragraph_adjacent, nullptr, {"min_words"}}},
        {"doc_few_stopwords", {RuleKind::DocumentVerdict, nullptr, doc_few_stopwords, {"min_fraction"}}},
        {"doc_nonletter_words",
         {RuleKind::DocumentVerdict, nullptr, doc_nonletter_words, {"max_fraction"}}},
        {"meta_threshold", {RuleKind::DocumentVerdict, nullptr, meta_threshold, {"field", "max", "min"}}},
    };
    return types;
}

const RuleType& type_of(const FilterRule& rule) {
    auto it = rule_types().find(rule.type);
    if (it == rule_types().end())
        throw FilterConfigError("unknown rule type '" + rule.type + "' in rule '" + rule.id + "'");
    return it->second;
}

}  // namespace

// --- Rule set loading --------------------------------------------------------------

RuleSet load_ruleset(const toml::Table& config) {
    const toml::Value* rules_value = toml::find(config, "rule");
    if (!rules_value || !rules_value->is_array())
        throw FilterConfigError("rule set config needs [[rule]] entries");

    RuleSet rules;
    std::set<std::string> ids;
    for (const toml::Value& entry : rules_value->as_array()) {
        if (!entry.is_table()) throw FilterConfigError("[[rule]] entry is not a table");
        const toml::Table& table = entry.as_table();
        FilterRule rule;
        rule.id = toml::get_string(table, "id", "");
        if (rule.id.empty()) throw FilterConfigError("rule without id");
        if (!ids.insert(rule.id).second) throw FilterConfigError("duplicate rule id '" + rule.id + "'");
        rule.language = toml::get_string(table, "language", "en");
        rule.type = toml::get_string(table, "type", "");
        std::string kind = toml::get_string(table, "kind", "");
        if (kind == "paragraph_transform") rule.kind = RuleKind::ParagraphTransform;
        else if (kind == "document_verdict") rule.kind = RuleKind::DocumentVerdict;
        else throw FilterConfigError("rule '" + rule.id + "' has bad kind '" + kind + "'");

        const RuleType& type = type_of(rule);
        if (type.kind != rule.kind)
            throw FilterConfigError("rule '" + rule.id + "' kind does not match type '" + rule.type + "'");
        for (const auto& [key, value] : table) {
            if (key == "id" || key == "language" || key == "kind" || key == "type") continue;
            if (std::find(type.allowed_params.begin(), type.allowed_params.end(), key) ==
                type.allowed_params.end()) {
                throw FilterConfigError("rule '" + rule.id + "' references unknown parameter '" +
                                        key + "'");
            }
            rule.params.emplace(key, value);
        }
        rules.push_back(std::move(rule));
    }
    return rules;
}

RuleSet load_ruleset_file(const std::string& path) {
    try {
        return load_ruleset(toml::parse_file(path));
    } catch (const toml::ParseError& e) {
        throw FilterConfigError(std::string("cannot load rule set: ") + e.what());
    }
}

RuleSet builtin_english_rules() {
    static const char* kToml = R"TOML(
[[rule]]
id = "abnormal_newlines"
kind = "paragraph_transform"
type = "collapse_newlines"

[[rule]]
id = "strip_urls"
kind = "paragraph_transform"
type = "strip_urls"

[[rule]]
id = "social_media_keywords"
kind = "paragraph_transform"
type = "keyword_paragraph"
keywords = ["facebook", "twitter", "instagram", "subscribe", "follow us"]

[[rule]]
id = "single_word_paragraph"
kind = "paragraph_transform"
type = "single_word_paragraph"

[[rule]]
id = "high_digit_paragraph"
kind = "paragraph_transform"
type = "high_digit_paragraph"
max_digit_fraction = 0.5

[[rule]]
id = "readmore_suffix"
kind = "paragraph_transform"
type = "suffix_paragraph"
suffixes = ["readmore", "read more"]

[[rule]]
id = "uppercase_heavy"
kind = "paragraph_transform"
type = "uppercase_heavy"
max_upper_fraction = 0.5
min_letters = 20

[[rule]]
id = "short_paragraph"
kind = "paragraph_transform"
type = "short_paragraph_adjacent"
min_words = 3

[[rule]]
id = "doc_few_stopwords"
kind = "document_verdict"
type = "doc_few_stopwords"
min_fraction = 0.04

[[rule]]
id = "doc_nonletter_words"
kind = "document_verdict"
type = "doc_nonletter_words"
max_fraction = 0.3
)TOML";
    return load_ruleset(toml::parse(kToml));
}

// --- apply_detailed_rules -------------------------------------------------------------

std::pair<StreamDocument, FilterVerdict> apply_detailed_rules(const StreamDocument& doc,
                                                              const RuleSet& rules) {
    StreamDocument out = doc;
    std::vector<bool> removed(out.elements.size(), false);
    std::vector<std::string> triggered;
    auto trigger = [&](const std::string& id) {
        if (std::find(triggered.begin(), triggered.end(), id) == triggered.end())
            triggered.push_back(id);
    };

    bool modified = false;
    for (const FilterRule& rule : rules) {
        const RuleType& type = type_of(rule);
        if (rule.kind != RuleKind::ParagraphTransform) continue;
        for (size_t i = 0; i < out.elements.size(); ++i) {
            Element& element = out.elements[i];
            if (element.tag != ElementTag::Text || removed[i]) continue;
            ParagraphContext ctx{i, &out.elements, &removed};
            auto result = type.paragraph(element.content, rule, ctx);
            if (!result) {
                removed[i] = true;
                modified = true;
                trigger(rule.id);
            } else if (*result != element.content) {
                element.content = std::move(*result);
                modified = true;
                trigger(rule.id);
                if (element.content.empty()) removed[i] = true;
            }
        }
    }

    // Drop tombstoned paragraphs, preserving the order of everything else.
    std::vector<Element> surviving;
    surviving.reserve(out.elements.size());
    for (size_t i = 0; i < out.elements.size(); ++i) {
        if (!removed[i]) surviving.push_back(std::move(out.elements[i]));
    }
    out.elements = std::move(surviving);

    FilterVerdict verdict;
    for (const FilterRule& rule : rules) {
        if (rule.kind != RuleKind::DocumentVerdict) continue;
        const RuleType& type = type_of(rule);
        if (type.verdict(out, rule)) {
            trigger(rule.id);
            if (verdict.decision != FilterDecision::Drop) {
                verdict.decision = FilterDecision::Drop;
                verdict.drop_reason = rule.id;
            }
        }
    }
    if (verdict.decision != FilterDecision::Drop && modified)
        verdict.decision = FilterDecision::Modified;
    verdict.triggered_rules = std::move(triggered);
    return {std::move(out), std::move(verdict)};
}

// --- evaluate_ruleset ---------------------------------------------------------------

std::vector<AnnotatedSample> parse_annotations_jsonl(std::string_view text) {
    std::vector<AnnotatedSample> out;
    size_t start = 0;
    int line_no = 0;
    while (start < text.size()) {
        size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw FilterConfigError("annotations line " + std::to_string(line_no) + ": " + e.what());
        }
        AnnotatedSample sample;
        sample.doc_id = j.at("doc_id").get<std::string>();
        std::string verdict = j.at("verdict").get<std::string>();
        if (verdict == "good") sample.good = true;
        else if (verdict == "bad") sample.good = false;
        else throw FilterConfigError("annotations line " + std::to_string(line_no) +
                                     ": verdict must be good|bad");
        if (j.contains("problem")) sample.problem = j["problem"].get<std::string>();
        if (j.contains("rules")) {
            for (const auto& [rule_id, agreed] : j["rules"].items())
                sample.rule_verdicts[rule_id] = agreed.get<bool>();
        }
        out.push_back(std::move(sample));
    }
    return out;
}

std::vector<RuleStats> evaluate_ruleset(const std::vector<StreamDocument>& corpus,
                                        const RuleSet& rules,
                                        const std::vector<AnnotatedSample>& annotations) {
    std::unordered_set<std::string> corpus_ids;
    for (const auto& doc : corpus) corpus_ids.insert(doc.id);
    std::string unknown;
    std::unordered_map<std::string, bool> verdict_by_id;
    for (const auto& sample : annotations) {
        if (!corpus_ids.count(sample.doc_id)) unknown += (unknown.empty() ? "" : ", ") + sample.doc_id;
        verdict_by_id[sample.doc_id] = sample.good;
    }
    if (!unknown.empty())
        throw FilterConfigError("annotated ids not present in corpus: " + unknown);

    std::unordered_map<std::string, int64_t> fired, fired_good;
    for (const auto& doc : corpus) {
        auto [transformed, verdict] = apply_detailed_rules(doc, rules);
        auto it = verdict_by_id.find(doc.id);
        bool annotated_good = it != verdict_by_id.end() && it->second;
        for (const auto& id : verdict.triggered_rules) {
            ++fired[id];
            if (annotated_good) ++fired_good[id];
        }
    }

    std::vector<RuleStats> stats;
    for (const FilterRule& rule : rules) {
        RuleStats s;
        s.rule_id = rule.id;
        s.fired_docs = fired[rule.id];
        s.trigger_ratio = corpus.empty()
                              ? 0.0
                              : static_cast<double>(s.fired_docs) / static_cast<double>(corpus.size());
        s.fpr = s.fired_docs == 0 ? 0.0
                                  : static_cast<double>(fired_good[rule.id]) /
                                        static_cast<double>(s.fired_docs);
        stats.push_back(std::move(s));
    }
    return stats;
}

std::string rule_stats_to_tsv(const std::vector<RuleStats>& stats) {
    std::ostringstream out;
    out << "rule\ttrigger_ratio\tfpr\n";
    for (const auto& s : stats) out << s.rule_id << '\t' << s.trigger_ratio << '\t' << s.fpr << '\n';
    return out.str();
}

// --- feedback_round ---------------------------------------------------------------------

FeedbackRoundReport feedback_round(const FeedbackState& state, const RuleSet& candidates,
                                   const std::vector<AnnotatedSample>& annotations,
                                   double promote_threshold, uint64_t seed) {
    if (state.sample_size > state.corpus.size())
        throw FilterConfigError("sample size " + std::to_string(state.sample_size) +
                                " exceeds corpus size " + std::to_string(state.corpus.size()));
    std::unordered_set<std::string> existing;
    for (const auto& rule : state.rules) existing.insert(rule.id);
    for (const auto& rule : candidates) {
        if (existing.count(rule.id))
            throw FilterConfigError("candidate rule id '" + rule.id + "' already in the rule set");
    }

    // Fisher-Yates prefix with a splitmix64 stream: the same seed draws the
    // same sample on every platform.
    std::vector<size_t> order(state.corpus.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    uint64_t rng = seed;
    auto next = [&rng] {
        rng += 0x9e3779b97f4a7c15ULL;
        return splitmix64(rng);
    };
    for (size_t i = 0; i < state.sample_size; ++i) {
        size_t j = i + static_cast<size_t>(next() % (order.size() - i));
        std::swap(order[i], order[j]);
    }

    FeedbackRoundReport report;
    std::vector<StreamDocument> sample;
    sample.reserve(state.sample_size);
    for (size_t i = 0; i < state.sample_size; ++i) {
        sample.push_back(state.corpus[order[i]]);
        report.sampled_ids.push_back(state.corpus[order[i]].id);
    }

    // Only annotations for sampled docs matter this round.
    std::unordered_set<std::string> sampled_ids(report.sampled_ids.begin(), report.sampled_ids.end());
    std::vector<AnnotatedSample> sample_annotations;
    for (const auto& a : annotations) {
        if (sampled_ids.count(a.doc_id)) sample_annotations.push_back(a);
    }

    report.candidate_stats = evaluate_ruleset(sample, candidates, sample_annotations);

    RuleSet promoted;
    for (size_t i = 0; i < candidates.size(); ++i) {
        const RuleStats& stats = report.candidate_stats[i];
        if (stats.fpr <= promote_threshold) {
            FilterRule rule = candidates[i];
            rule.measured_fpr = stats.fpr;
            report.promoted_ids.push_back(rule.id);
            promoted.push_back(std::move(rule));
        } else {
            report.rejected.emplace_back(candidates[i].id, stats.fpr);
        }
    }

    // Review sheet for the next human pass: sampled docs plus triggers.
    std::ostringstream sheet;
    for (const auto& doc : sample) {
        auto [transformed, verdict] = apply_detailed_rules(doc, candidates);
        nlohmann::ordered_json j;
        j["doc_id"] = doc.id;
        j["text"] = to_text_corpus(doc);
        j["triggered"] = verdict.triggered_rules;
        sheet << j.dump() << '\n';
    }
    report.review_sheet_jsonl = sheet.str();

    // D^{i+1}: promoted rules applied to the whole corpus; dropped docs leave.
    FeedbackState next_state;
    next_state.iteration = state.iteration + 1;
    next_state.rules = state.rules;
    next_state.rules.insert(next_state.rules.end(), promoted.begin(), promoted.end());
    next_state.sample_size = state.sample_size;
    next_state.problems_per_round = candidates.size();
    for (const auto& doc : state.corpus) {
        auto [transformed, verdict] = apply_detailed_rules(doc, promoted);
        if (verdict.decision != FilterDecision::Drop) next_state.corpus.push_back(std::move(transformed));
    }
    report.state = std::move(next_state);
    return report;
}

}  // namespace omni
