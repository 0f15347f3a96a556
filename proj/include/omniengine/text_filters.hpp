#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "omniengine/stream_format.hpp"
#include "omniengine/toml.hpp"

namespace omni {

class FilterConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class FilterDecision { Keep, Drop, Modified };

struct FilterVerdict {
    FilterDecision decision = FilterDecision::Keep;
    std::string drop_reason;  // primary reason (first firing check/rule), set iff Drop
    std::vector<std::string> triggered_rules;
};

// --- Preliminary document filtering ----------------------------------------

// Thresholds for the cheap per-document checks that run before anything
// expensive. The defaults follow the usual corpus-cleaning conventions and
// are config-overridable.
struct PreliminaryConfig {
    int64_t min_words = 50;
    int64_t max_words = 100000;
    double min_mean_word_length = 3.0;
    double max_mean_word_length = 10.0;
    double max_symbol_ratio = 0.1;       // {#, …, ...} per word
    int min_distinct_stopwords = 2;
    int max_consecutive_blank_lines = 3;  // a longer run drops
    double max_top_word_fraction = 0.20;
    double max_digit_fraction = 0.5;      // digit chars per non-whitespace char
};

// Checks run in a fixed order (word count, mean word length, symbol ratio,
// stop words, lorem ipsum, blank lines, top word, digits); the first failure
// is the drop reason and every failure lands in triggered_rules.
FilterVerdict preliminary_filter(const StreamDocument& doc, const PreliminaryConfig& config = {});

// --- Detailed rule engine ----------------------------------------------------

enum class RuleKind { ParagraphTransform, DocumentVerdict };

struct FilterRule {
    std::string id;
    std::string language = "en";
    RuleKind kind = RuleKind::ParagraphTransform;
    std::string type;    // predicate implementation name
    toml::Table params;  // validated against the type at load time
    std::optional<double> measured_fpr;
};

using RuleSet = std::vector<FilterRule>;

// Loads [[rule]] entries; ids must be unique, types known, and every key a
// declared parameter of the type. Errors here, never mid-stream.
RuleSet load_ruleset(const toml::Table& config);
RuleSet load_ruleset_file(const std::string& path);

// The shipped English rule set.
RuleSet builtin_english_rules();

// Paragraph transforms apply to text elements in rule-set order (a rule may
// rewrite a paragraph or delete it); document verdicts then run on the
// transformed document. Image elements are never touched and surviving
// elements keep their order.
std::pair<StreamDocument, FilterVerdict> apply_detailed_rules(const StreamDocument& doc,
                                                              const RuleSet& rules);

// --- Evaluation ----------------------------------------------------------------

struct AnnotatedSample {
    std::string doc_id;
    bool good = false;     // human verdict
    std::string problem;   // tag for bad docs
    // Optional fine-grained judgments: rule id -> the annotator agreed the
    // rule should fire on this document.
    std::map<std::string, bool> rule_verdicts;
};

std::vector<AnnotatedSample> parse_annotations_jsonl(std::string_view text);

struct RuleStats {
    std::string rule_id;
    int64_t fired_docs = 0;
    double trigger_ratio = 0.0;  // fired / corpus size
    double fpr = 0.0;            // fired-and-good / fired (0 when never fired)
};

// Rules fire as a set (application order included); annotations must all
// reference corpus ids.
std::vector<RuleStats> evaluate_ruleset(const std::vector<StreamDocument>& corpus,
                                        const RuleSet& rules,
                                        const std::vector<AnnotatedSample>& annotations);

std::string rule_stats_to_tsv(const std::vector<RuleStats>& stats);

// --- Human-feedback iteration ---------------------------------------------------

struct FeedbackState {
    int iteration = 0;
    RuleSet rules;  // F: grows monotonically across rounds
    size_t sample_size = 1000;       // n
    size_t problems_per_round = 0;   // m, informational
    std::vector<StreamDocument> corpus;  // D^i
};

struct FeedbackRoundReport {
    FeedbackState state;  // the i+1 state
    std::vector<std::string> sampled_ids;
    std::vector<RuleStats> candidate_stats;   // measured on the sample
    std::vector<std::string> promoted_ids;
    std::vector<std::pair<std::string, double>> rejected;  // (id, fpr)
    std::string review_sheet_jsonl;  // sampled docs with per-rule triggers
};

// One iteration: sample n docs without replacement (deterministic in the
// seed), measure candidate rules on the sample, promote those with
// fpr <= promote_threshold, apply the promoted rules to the whole corpus.
FeedbackRoundReport feedback_round(const FeedbackState& state, const RuleSet& candidates,
                                   const std::vector<AnnotatedSample>& annotations,
                                   double promote_threshold, uint64_t seed);

}  // namespace omni
