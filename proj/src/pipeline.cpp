#include "omniengine/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "omniengine/image.hpp"
#include "omniengine/queue.hpp"

namespace omni {

// --- logging -------------------------------------------------------------------

namespace {

LogLevel current_log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("OMNIENGINE_LOG");
        if (!env) return LogLevel::Warn;
        std::string v(env);
        if (v == "error") return LogLevel::Error;
        if (v == "warn") return LogLevel::Warn;
        if (v == "info") return LogLevel::Info;
        if (v == "debug") return LogLevel::Debug;
        return LogLevel::Warn;
    }();
    return level;
}

std::mutex log_mutex;

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

void log(LogLevel level, const std::string& message) {
    if (level > current_log_level()) return;
    static const char* names[] = {"error", "warn", "info", "debug"};
    std::lock_guard lock(log_mutex);
    std::cerr << "[" << names[static_cast<int>(level)] << "] " << message << "\n";
}

// --- config ----------------------------------------------------------------------

PipelineConfig load_pipeline_config(const toml::Table& config) {
    PipelineConfig out;
    if (const toml::Value* stages = toml::find(config, "stages")) {
        const toml::Table& t = stages->as_table();
        out.preliminary = toml::get_bool(t, "preliminary", true);
        out.dedup = toml::get_bool(t, "dedup", true);
        out.images = toml::get_bool(t, "images", true);
        out.detailed = toml::get_bool(t, "detailed", true);
    }
    out.hard_drop = toml::get_bool(config, "hard_drop", false);
    out.seed = static_cast<uint64_t>(toml::get_int(config, "seed", 0));
    out.workers = static_cast<unsigned>(toml::get_int(config, "workers", 1));
    out.queue_capacity = static_cast<size_t>(toml::get_int(config, "queue_capacity", 1024));

    if (const toml::Value* paths = toml::find(config, "paths")) {
        const toml::Table& t = paths->as_table();
        out.input_path = toml::get_string(t, "input", "");
        out.output_path = toml::get_string(t, "output", "");
        out.report_path = toml::get_string(t, "report", "");
        out.rejects_path = toml::get_string(t, "rejects", "");
    }

    if (const toml::Value* prelim = toml::find(config, "preliminary")) {
        const toml::Table& t = prelim->as_table();
        PreliminaryConfig& p = out.preliminary_config;
        p.min_words = toml::get_int(t, "min_words", p.min_words);
        p.max_words = toml::get_int(t, "max_words", p.max_words);
        p.min_mean_word_length = toml::get_float(t, "min_mean_word_length", p.min_mean_word_length);
        p.max_mean_word_length = toml::get_float(t, "max_mean_word_length", p.max_mean_word_length);
        p.max_symbol_ratio = toml::get_float(t, "max_symbol_ratio", p.max_symbol_ratio);
        p.min_distinct_stopwords =
            static_cast<int>(toml::get_int(t, "min_distinct_stopwords", p.min_distinct_stopwords));
        p.max_consecutive_blank_lines = static_cast<int>(
            toml::get_int(t, "max_consecutive_blank_lines", p.max_consecutive_blank_lines));
        p.max_top_word_fraction = toml::get_float(t, "max_top_word_fraction", p.max_top_word_fraction);
        p.max_digit_fraction = toml::get_float(t, "max_digit_fraction", p.max_digit_fraction);
    }

    if (const toml::Value* dedup = toml::find(config, "dedup")) {
        const toml::Table& t = dedup->as_table();
        DedupConfig& d = out.dedup_config;
        d.minhash.k = static_cast<int>(toml::get_int(t, "k", d.minhash.k));
        d.minhash.shingle_width = static_cast<int>(toml::get_int(t, "w", d.minhash.shingle_width));
        d.bands = static_cast<int>(toml::get_int(t, "bands", d.bands));
        d.rows = static_cast<int>(toml::get_int(t, "rows", d.rows));
        d.threshold = toml::get_float(t, "threshold", d.threshold);
    }

    if (const toml::Value* rules = toml::find(config, "rules")) {
        out.ruleset_path = toml::get_string(rules->as_table(), "path", "");
    }

    if (const toml::Value* images = toml::find(config, "images")) {
        const toml::Table& t = images->as_table();
        out.image_root = toml::get_string(t, "root", "");
        out.bloom_bits = static_cast<uint64_t>(toml::get_int(t, "bloom_bits", 1 << 22));
        out.bloom_hashes = static_cast<int>(toml::get_int(t, "bloom_hashes", 7));
        out.occurrence_limit = toml::get_int(t, "occurrence_limit", 10);
        out.fetch.max_retries = static_cast<int>(toml::get_int(t, "max_retries", 2));
        out.fetch.max_body_bytes = static_cast<uint64_t>(
            toml::get_int(t, "max_body_bytes", static_cast<int64_t>(out.fetch.max_body_bytes)));
        out.fetch.per_host_limit = static_cast<int>(toml::get_int(t, "per_host_limit", 4));
        ImageFilterConfig& f = out.image_filter;
        f.min_dimension = static_cast<int>(toml::get_int(t, "min_dimension", f.min_dimension));
        f.max_aspect = toml::get_float(t, "max_aspect", f.max_aspect);
        f.min_aspect = toml::get_float(t, "min_aspect", f.min_aspect);
        f.min_aesthetic = toml::get_float(t, "min_aesthetic", f.min_aesthetic);
        f.max_nsfw = toml::get_float(t, "max_nsfw", f.max_nsfw);
    }

    // Fail-fast validation: referenced paths must exist, thresholds must be
    // in range.
    if (!out.input_path.empty() && !std::filesystem::exists(out.input_path))
        throw PipelineConfigError("input path does not exist: " + out.input_path);
    if (!out.ruleset_path.empty() && !std::filesystem::exists(out.ruleset_path))
        throw PipelineConfigError("rule set path does not exist: " + out.ruleset_path);
    if (!out.image_root.empty() && !std::filesystem::exists(out.image_root))
        throw PipelineConfigError("image root does not exist: " + out.image_root);
    if (out.dedup_config.threshold < 0.0 || out.dedup_config.threshold > 1.0)
        throw PipelineConfigError("dedup threshold must be in [0,1]");
    if (out.image_filter.max_nsfw < 0.0 || out.image_filter.max_nsfw > 1.0)
        throw PipelineConfigError("nsfw threshold must be in [0,1]");
    if (out.image_filter.min_aesthetic < 0.0 || out.image_filter.min_aesthetic > 10.0)
        throw PipelineConfigError("aesthetic threshold must be in [0,10]");
    if (out.workers == 0) throw PipelineConfigError("workers must be >= 1");
    return out;
}

PipelineConfig load_pipeline_config_file(const std::string& path) {
    try {
        return load_pipeline_config(toml::parse_file(path));
    } catch (const toml::ParseError& e) {
        throw PipelineConfigError(std::string("cannot parse config: ") + e.what());
    }
}

// --- jsonl corpus io -----------------------------------------------------------------

CorpusLoad read_jsonl_corpus(std::istream& in) {
    CorpusLoad load;
    std::string line;
    int64_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        try {
            load.docs.push_back(parse_document(line));
        } catch (const DocumentParseError& e) {
            load.quarantined.push_back({line_number, e.what(), line});
            log(LogLevel::Warn,
                "quarantined line " + std::to_string(line_number) + ": " + e.what());
        }
    }
    return load;
}

void write_jsonl_corpus(std::ostream& out, const std::vector<StreamDocument>& docs) {
    for (const StreamDocument& doc : docs) out << serialize_document(doc) << '\n';
}

// --- report ---------------------------------------------------------------------------

std::string RunReport::to_json() const {
    nlohmann::ordered_json j;
    nlohmann::ordered_json stage_rows = nlohmann::ordered_json::array();
    for (const StageReport& s : stages) {
        nlohmann::ordered_json row;
        row["stage"] = s.stage;
        row["input_docs"] = s.input_docs;
        row["output_docs"] = s.output_docs;
        row["removal_fraction"] = s.removal_fraction;
        row["wall_seconds"] = s.wall_seconds;
        stage_rows.push_back(std::move(row));
    }
    j["stages"] = std::move(stage_rows);
    j["rule_triggers"] = rule_triggers;
    nlohmann::ordered_json images;
    images["urls_seen"] = urls_seen;
    images["urls_deduped"] = urls_deduped;
    images["fetched"] = images_fetched;
    images["failed"] = images_failed;
    j["images"] = std::move(images);
    j["quarantined_lines"] = quarantined_lines;
    return j.dump(2);
}

// --- the engine -------------------------------------------------------------------------

namespace {

void sort_by_id(std::vector<StreamDocument>& docs) {
    std::sort(docs.begin(), docs.end(),
              [](const StreamDocument& a, const StreamDocument& b) { return a.id < b.id; });
}

struct ImageWork {
    size_t doc_index;
    size_t element_index;
    std::string url;  // normalized
};

}  // namespace

PipelineOutcome run_pipeline_on(std::vector<StreamDocument> docs, const PipelineConfig& config,
                                Fetcher* fetcher_override) {
    PipelineOutcome outcome;
    std::vector<RejectedDocument> rejects;

    RuleSet rules;
    if (config.detailed) {
        rules = config.ruleset_path.empty() ? builtin_english_rules()
                                            : load_ruleset_file(config.ruleset_path);
    }

    // Stage 1: preliminary text filtering (destructive).
    if (config.preliminary) {
        auto start = std::chrono::steady_clock::now();
        int64_t input_count = static_cast<int64_t>(docs.size());
        std::vector<FilterVerdict> verdicts(docs.size());
        parallel_for(docs.size(), config.workers, [&](size_t i) {
            verdicts[i] = preliminary_filter(docs[i], config.preliminary_config);
        });
        std::vector<StreamDocument> kept;
        kept.reserve(docs.size());
        for (size_t i = 0; i < docs.size(); ++i) {
            if (verdicts[i].decision == FilterDecision::Drop) {
                for (const auto& id : verdicts[i].triggered_rules)
                    ++outcome.report.rule_triggers["preliminary." + id];
                rejects.push_back({std::move(docs[i]), "preliminary", verdicts[i].drop_reason});
            } else {
                kept.push_back(std::move(docs[i]));
            }
        }
        docs = std::move(kept);
        outcome.report.stages.push_back(
            {"preliminary", input_count, static_cast<int64_t>(docs.size()),
             input_count == 0 ? 0.0
                              : 1.0 - static_cast<double>(docs.size()) / static_cast<double>(input_count),
             seconds_since(start)});
    }

    // Stage 2: document deduplication (destructive, keep latest).
    if (config.dedup) {
        auto start = std::chrono::steady_clock::now();
        int64_t input_count = static_cast<int64_t>(docs.size());
        DedupConfig dedup_config = config.dedup_config;
        dedup_config.minhash.seed = config.seed;
        dedup_config.workers = config.workers;
        DedupResult result = dedup_corpus(docs, dedup_config);

        std::unordered_map<std::string, std::string> survivor_of;
        for (const DuplicateGroup& group : result.groups) {
            for (const std::string& member : group.member_ids) {
                if (member != group.survivor_id) survivor_of[member] = group.survivor_id;
            }
        }
        for (StreamDocument& doc : docs) {
            auto it = survivor_of.find(doc.id);
            if (it != survivor_of.end())
                rejects.push_back({std::move(doc), "dedup", "duplicate_of=" + it->second});
        }
        docs = std::move(result.survivors);
        outcome.report.stages.push_back(
            {"dedup", input_count, static_cast<int64_t>(docs.size()),
             input_count == 0 ? 0.0
                              : 1.0 - static_cast<double>(docs.size()) / static_cast<double>(input_count),
             seconds_since(start)});
    }

    // Stage 3: image download and filtering. Annotates image statuses and
    // fingerprints; destructive only under hard_drop (documents whose images
    // all fail leave the corpus).
    if (config.images) {
        auto start = std::chrono::steady_clock::now();
        int64_t input_count = static_cast<int64_t>(docs.size());

        std::vector<ImageWork> work;
        std::vector<FetchTask> tasks;
        for (size_t d = 0; d < docs.size(); ++d) {
            for (size_t e = 0; e < docs[d].elements.size(); ++e) {
                Element& element = docs[d].elements[e];
                if (element.tag != ElementTag::Image) continue;
                if (element.image->status.kind != ImageStatusKind::Pending) continue;
                FetchTask task = make_fetch_task(element.image->url, docs[d].id);
                work.push_back({d, e, task.url});
                tasks.push_back(std::move(task));
            }
        }

        std::unique_ptr<Fetcher> owned_fetcher;
        Fetcher* fetcher = fetcher_override;
        if (!fetcher) {
            if (!config.image_root.empty()) owned_fetcher = std::make_unique<FileFetcher>(config.image_root);
            else owned_fetcher = std::make_unique<HttpFetcher>();
            fetcher = owned_fetcher.get();
        }
        BloomFilter bloom(config.bloom_bits, config.bloom_hashes, config.seed);
        FetchConfig fetch_config = config.fetch;
        fetch_config.workers = config.workers;
        FetchReport fetch_report = fetch_images(tasks, *fetcher, bloom, fetch_config);
        outcome.report.urls_seen = fetch_report.urls_seen;
        outcome.report.urls_deduped = fetch_report.urls_deduped;
        outcome.report.images_fetched = fetch_report.fetched;
        outcome.report.images_failed = fetch_report.failed;

        StubScorer scorer;
        ImageDecoder decoder = default_decoder();
        OccurrenceTable occurrences;
        std::mutex occurrence_mutex;
        parallel_for(work.size(), config.workers, [&](size_t i) {
            const ImageWork& w = work[i];
            ImageRef& ref = *docs[w.doc_index].elements[w.element_index].image;
            const auto& outcome_ptr = fetch_report.results[i].second;
            if (outcome_ptr->kind == FetchOutcomeKind::SkippedDuplicate) {
                ref.status = ImageStatus::dropped("duplicate_url");
                return;
            }
            if (outcome_ptr->kind == FetchOutcomeKind::Failed) {
                ref.status = ImageStatus::failed();
                return;
            }
            auto decoded = decoder(outcome_ptr->bytes, outcome_ptr->content_type);
            if (!decoded) {
                ref.status = ImageStatus::dropped("undecodable");
                return;
            }
            ref.width = decoded->width;
            ref.height = decoded->height;
            ref.aesthetic = scorer.aesthetic(outcome_ptr->bytes);
            ref.nsfw = scorer.nsfw(outcome_ptr->bytes);
            if (auto reason = filter_image(ref, config.image_filter)) {
                ref.status = ImageStatus::dropped(std::string(to_string(*reason)));
                return;
            }
            ref.phash = phash(*decoded);
            ref.dhash = dhash(*decoded);
            ref.status = ImageStatus::fetched();
            std::lock_guard lock(occurrence_mutex);
            occurrences.add(*ref.phash, *ref.dhash, docs[w.doc_index].id);
        });

        auto over_limit = image_occurrence_filter(occurrences, config.occurrence_limit);
        if (!over_limit.empty()) {
            std::set<std::pair<uint64_t, uint64_t>> removed(over_limit.begin(), over_limit.end());
            for (StreamDocument& doc : docs) {
                for (Element& element : doc.elements) {
                    if (element.tag != ElementTag::Image || !element.image->phash) continue;
                    if (removed.count({*element.image->phash, *element.image->dhash}))
                        element.image->status = ImageStatus::dropped("occurrence");
                }
            }
        }

        if (config.hard_drop) {
            std::vector<StreamDocument> kept;
            kept.reserve(docs.size());
            for (StreamDocument& doc : docs) {
                bool any_image = false;
                for (const Element& element : doc.elements) {
                    if (element.tag == ElementTag::Image &&
                        element.image->status.kind == ImageStatusKind::Fetched)
                        any_image = true;
                }
                if (any_image) kept.push_back(std::move(doc));
                else rejects.push_back({std::move(doc), "images", "no_image"});
            }
            docs = std::move(kept);
        }
        outcome.report.stages.push_back(
            {"images", input_count, static_cast<int64_t>(docs.size()),
             input_count == 0 ? 0.0
                              : 1.0 - static_cast<double>(docs.size()) / static_cast<double>(input_count),
             seconds_since(start)});
    }

    // Stage 4: detailed text filtering. Transforms always apply; verdicts
    // are annotations unless hard_drop is set.
    if (config.detailed) {
        auto start = std::chrono::steady_clock::now();
        int64_t input_count = static_cast<int64_t>(docs.size());
        std::vector<std::pair<StreamDocument, FilterVerdict>> results(docs.size());
        parallel_for(docs.size(), config.workers, [&](size_t i) {
            results[i] = apply_detailed_rules(docs[i], rules);
        });
        std::vector<StreamDocument> kept;
        kept.reserve(docs.size());
        for (size_t i = 0; i < results.size(); ++i) {
            auto& [transformed, verdict] = results[i];
            for (const auto& id : verdict.triggered_rules)
                ++outcome.report.rule_triggers["detailed." + id];
            if (config.hard_drop && verdict.decision == FilterDecision::Drop) {
                rejects.push_back({std::move(transformed), "detailed", verdict.drop_reason});
            } else {
                kept.push_back(std::move(transformed));
            }
        }
        docs = std::move(kept);
        outcome.report.stages.push_back(
            {"detailed", input_count, static_cast<int64_t>(docs.size()),
             input_count == 0 ? 0.0
                              : 1.0 - static_cast<double>(docs.size()) / static_cast<double>(input_count),
             seconds_since(start)});
    }

    sort_by_id(docs);
    std::sort(rejects.begin(), rejects.end(),
              [](const RejectedDocument& a, const RejectedDocument& b) { return a.doc.id < b.doc.id; });
    outcome.output = std::move(docs);
    outcome.rejects = std::move(rejects);
    return outcome;
}

RunReport run_pipeline(const PipelineConfig& config) {
    if (config.input_path.empty() || config.output_path.empty())
        throw PipelineConfigError("pipeline needs input and output paths");

    std::ifstream in(config.input_path, std::ios::binary);
    if (!in) throw PipelineConfigError("cannot open input: " + config.input_path);
    CorpusLoad load = read_jsonl_corpus(in);

    PipelineOutcome outcome = run_pipeline_on(std::move(load.docs), config);
    outcome.report.quarantined_lines = static_cast<int64_t>(load.quarantined.size());

    std::ofstream out(config.output_path, std::ios::binary);
    if (!out) throw PipelineConfigError("cannot open output: " + config.output_path);
    write_jsonl_corpus(out, outcome.output);

    if (!config.rejects_path.empty()) {
        std::ofstream rejects_out(config.rejects_path, std::ios::binary);
        for (const RejectedDocument& r : outcome.rejects) {
            nlohmann::ordered_json j;
            j["stage"] = r.stage;
            j["reason"] = r.reason;
            j["doc"] = nlohmann::ordered_json::parse(serialize_document(r.doc));
            rejects_out << j.dump() << '\n';
        }
        for (const QuarantinedLine& q : load.quarantined) {
            nlohmann::ordered_json j;
            j["stage"] = "parse";
            j["reason"] = q.error;
            j["line_number"] = q.line_number;
            j["raw"] = q.raw;
            rejects_out << j.dump() << '\n';
        }
    }

    if (!config.report_path.empty()) {
        std::ofstream report_out(config.report_path, std::ios::binary);
        report_out << outcome.report.to_json() << '\n';
    }
    return outcome.report;
}

}  // namespace omni
