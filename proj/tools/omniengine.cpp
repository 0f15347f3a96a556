// omniengine: converts raw web captures into filtered, deduplicated
// image-text interleaved documents, and models pipeline-stage ordering.
//
// Exit codes: 0 success, 1 fatal error, 2 configuration error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "omniengine/dedup.hpp"
#include "omniengine/extract.hpp"
#include "omniengine/image_pipeline.hpp"
#include "omniengine/metrics.hpp"
#include "omniengine/pipeline.hpp"
#include "omniengine/scheduler.hpp"
#include "omniengine/stream_format.hpp"
#include "omniengine/queue.hpp"
#include "omniengine/text_filters.hpp"
#include "omniengine/warc.hpp"

namespace {

using namespace omni;

class ConfigExit : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigExit("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigExit("cannot open output " + path);
    return out;
}

CorpusLoad load_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigExit("cannot open input " + path);
    return read_jsonl_corpus(in);
}

std::vector<std::string> default_ad_patterns() {
    return {"ad", "ads", "banner", "sponsor", "pixel", "track"};
}

std::vector<std::string> load_ad_patterns(const std::string& path) {
    if (path.empty()) return default_ad_patterns();
    std::vector<std::string> patterns;
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        patterns.push_back(line);
    }
    return patterns;
}

// --- extract ---------------------------------------------------------------

// One sequential producer (the WARC reader or directory scan) feeds a
// bounded queue of extraction workers; results carry their input sequence
// number so output order matches input order for any worker count.
int cmd_extract(const std::string& warc_path, const std::string& html_dir,
                const std::string& output_path, const std::string& rejects_path,
                const std::string& ad_patterns_path, unsigned workers) {
    ExtractConfig config;
    config.ad_url_patterns = load_ad_patterns(ad_patterns_path);

    struct Capture {
        size_t sequence;
        std::string url;
        UtcTime timestamp;
        std::string html;
        std::string charset;
    };
    struct Extracted {
        size_t sequence;
        std::string url;
        std::optional<std::string> line;  // serialized doc, or nullopt when dropped
        std::string drop_reason;
    };

    BoundedQueue<Capture> queue(256);
    std::mutex results_mutex;
    std::vector<Extracted> results;

    auto worker = [&] {
        while (auto capture = queue.pop()) {
            Extracted extracted;
            extracted.sequence = capture->sequence;
            extracted.url = capture->url;
            try {
                ExtractResult result = extract_document(capture->html, capture->url,
                                                        capture->timestamp, config, capture->charset);
                if (auto* doc = std::get_if<StreamDocument>(&result)) {
                    extracted.line = serialize_document(*doc);
                } else {
                    extracted.drop_reason = std::string(to_string(std::get<ExtractDrop>(result)));
                }
            } catch (const DecodeError&) {
                extracted.drop_reason = "decode_error";
            }
            std::lock_guard lock(results_mutex);
            results.push_back(std::move(extracted));
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::max(1u, workers); ++t) pool.emplace_back(worker);

    size_t sequence = 0;
    try {
        if (!warc_path.empty()) {
            std::ifstream in(warc_path, std::ios::binary);
            if (!in) throw ConfigExit("cannot open " + warc_path);
            WarcReader reader(in);
            while (auto capture = reader.next_html()) {
                queue.push({sequence++, capture->url, capture->timestamp, std::move(capture->html),
                            capture->http_charset});
            }
        } else {
            for (auto& capture : ingest_html_dir(html_dir)) {
                queue.push({sequence++, capture.url, capture.timestamp, std::move(capture.html), ""});
            }
        }
    } catch (...) {
        queue.close();
        for (auto& t : pool) t.join();
        throw;
    }
    queue.close();
    for (auto& t : pool) t.join();

    std::sort(results.begin(), results.end(),
              [](const Extracted& a, const Extracted& b) { return a.sequence < b.sequence; });

    auto out = open_output(output_path);
    std::ofstream rejects;
    if (!rejects_path.empty()) rejects = open_output(rejects_path);
    int64_t emitted = 0, dropped = 0;
    for (const Extracted& extracted : results) {
        if (extracted.line) {
            out << *extracted.line << '\n';
            ++emitted;
        } else {
            ++dropped;
            if (rejects.is_open()) rejects << extracted.url << '\t' << extracted.drop_reason << '\n';
        }
    }
    log(LogLevel::Info, "extract: " + std::to_string(emitted) + " documents, " +
                            std::to_string(dropped) + " dropped");
    return 0;
}

// --- filter ------------------------------------------------------------------

int cmd_filter_run(const std::string& input, const std::string& output, const std::string& rules_path,
                   const std::string& rejects_path, bool no_preliminary, bool no_detailed) {
    RuleSet rules = rules_path.empty() ? builtin_english_rules() : load_ruleset_file(rules_path);
    CorpusLoad load = load_corpus(input);
    auto out = open_output(output);
    std::ofstream rejects;
    if (!rejects_path.empty()) rejects = open_output(rejects_path);

    for (const StreamDocument& doc : load.docs) {
        if (!no_preliminary) {
            FilterVerdict verdict = preliminary_filter(doc);
            if (verdict.decision == FilterDecision::Drop) {
                if (rejects.is_open()) rejects << doc.id << "\tpreliminary." << verdict.drop_reason << '\n';
                continue;
            }
        }
        if (!no_detailed) {
            auto [transformed, verdict] = apply_detailed_rules(doc, rules);
            if (verdict.decision == FilterDecision::Drop) {
                if (rejects.is_open()) rejects << doc.id << "\tdetailed." << verdict.drop_reason << '\n';
                continue;
            }
            out << serialize_document(transformed) << '\n';
        } else {
            out << serialize_document(doc) << '\n';
        }
    }
    return 0;
}

int cmd_filter_eval(const std::string& input, const std::string& rules_path,
                    const std::string& annotations_path, const std::string& output) {
    RuleSet rules = rules_path.empty() ? builtin_english_rules() : load_ruleset_file(rules_path);
    CorpusLoad load = load_corpus(input);
    auto annotations = parse_annotations_jsonl(read_file(annotations_path));
    auto stats = evaluate_ruleset(load.docs, rules, annotations);
    std::string tsv = rule_stats_to_tsv(stats);
    if (output.empty()) std::cout << tsv;
    else open_output(output) << tsv;
    return 0;
}

int cmd_filter_feedback(const std::string& input, const std::string& candidates_path,
                        const std::string& annotations_path, double threshold, uint64_t seed,
                        size_t sample_size, const std::string& output,
                        const std::string& review_path) {
    RuleSet candidates = load_ruleset_file(candidates_path);
    CorpusLoad load = load_corpus(input);
    std::vector<AnnotatedSample> annotations;
    if (!annotations_path.empty()) annotations = parse_annotations_jsonl(read_file(annotations_path));

    FeedbackState state;
    state.corpus = std::move(load.docs);
    state.sample_size = std::min(sample_size, state.corpus.size());
    auto report = feedback_round(state, candidates, annotations, threshold, seed);

    if (!output.empty()) {
        auto out = open_output(output);
        write_jsonl_corpus(out, report.state.corpus);
    }
    if (!review_path.empty()) open_output(review_path) << report.review_sheet_jsonl;
    std::cout << "sampled\t" << report.sampled_ids.size() << "\n";
    for (const auto& id : report.promoted_ids) std::cout << "promoted\t" << id << "\n";
    for (const auto& [id, fpr] : report.rejected) std::cout << "rejected\t" << id << "\t" << fpr << "\n";
    return 0;
}

// --- dedup ----------------------------------------------------------------------

int cmd_dedup(const std::string& input, const std::string& output, const std::string& report_path,
              double threshold, int k, int w, int bands, int rows, uint64_t seed) {
    DedupConfig config;
    config.threshold = threshold;
    config.minhash.k = k;
    config.minhash.shingle_width = w;
    config.minhash.seed = seed;
    config.bands = bands;
    config.rows = rows;
    CorpusLoad load = load_corpus(input);
    DedupResult result = dedup_corpus(load.docs, config);
    auto out = open_output(output);
    write_jsonl_corpus(out, result.survivors);
    if (!report_path.empty()) open_output(report_path) << duplicate_groups_to_jsonl(result.groups);
    log(LogLevel::Info, "dedup: " + std::to_string(result.survivors.size()) + " survivors of " +
                            std::to_string(load.docs.size()));
    return 0;
}

// --- images ---------------------------------------------------------------------

int cmd_images(const std::string& input, const std::string& output, const std::string& root,
               uint64_t bloom_bits, int bloom_hashes, int64_t occurrence_limit, bool hard_drop,
               const std::string& report_path, uint64_t seed, unsigned workers) {
    PipelineConfig config;
    config.preliminary = false;
    config.dedup = false;
    config.detailed = false;
    config.images = true;
    config.hard_drop = hard_drop;
    config.image_root = root;
    config.bloom_bits = bloom_bits;
    config.bloom_hashes = bloom_hashes;
    config.occurrence_limit = occurrence_limit;
    config.seed = seed;
    config.workers = workers;

    CorpusLoad load = load_corpus(input);
    PipelineOutcome outcome = run_pipeline_on(std::move(load.docs), config);
    auto out = open_output(output);
    write_jsonl_corpus(out, outcome.output);
    if (!report_path.empty()) open_output(report_path) << outcome.report.to_json() << '\n';
    return 0;
}

// --- schedule ---------------------------------------------------------------------

int cmd_schedule(const std::string& profiles_path, double docs) {
    StageProfiles profiles = profiles_path.empty()
                                 ? default_stage_profiles()
                                 : load_stage_profiles(toml::parse_file(profiles_path));
    std::cout << plan_table_tsv(profiles, docs);
    return 0;
}

// --- stats -------------------------------------------------------------------------

int cmd_stats(const std::string& input, const std::string& histograms_path,
              const std::string& joint_path) {
    CorpusLoad load = load_corpus(input);
    std::vector<QualityMetrics> metrics;
    metrics.reserve(load.docs.size());
    for (const StreamDocument& doc : load.docs) metrics.push_back(compute_metrics(doc));
    MetricsAggregate agg = aggregate_metrics(metrics, default_bin_specs());
    std::string tsv = histograms_to_tsv(agg);
    if (histograms_path.empty()) std::cout << tsv;
    else open_output(histograms_path) << tsv;
    std::string joint = joint_table_to_json(agg);
    if (joint_path.empty()) std::cout << joint << "\n";
    else open_output(joint_path) << joint << '\n';
    return 0;
}

// --- run ----------------------------------------------------------------------------

int cmd_run(const std::string& config_path, std::optional<uint64_t> seed,
            std::optional<unsigned> workers, bool hard_drop, const std::string& input,
            const std::string& output, const std::string& report) {
    PipelineConfig config =
        config_path.empty() ? PipelineConfig{} : load_pipeline_config_file(config_path);
    if (seed) config.seed = *seed;
    if (workers) config.workers = *workers;
    if (hard_drop) config.hard_drop = true;
    if (!input.empty()) config.input_path = input;
    if (!output.empty()) config.output_path = output;
    if (!report.empty()) config.report_path = report;
    if (config.rejects_path.empty() && !config.output_path.empty())
        config.rejects_path = config.output_path + ".rejects";
    RunReport run_report = run_pipeline(config);
    for (const StageReport& stage : run_report.stages) {
        std::cout << stage.stage << '\t' << stage.input_docs << '\t' << stage.output_docs << '\t'
                  << stage.removal_fraction << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"image-text interleaved corpus data engine"};
    app.require_subcommand(1);

    // extract
    std::string warc_path, html_dir, output_path, rejects_path, ad_patterns_path;
    auto* extract = app.add_subcommand("extract", "HTML/WARC captures -> stream documents");
    auto* warc_opt = extract->add_option("--warc", warc_path, "WARC file (plain or per-record gzip)");
    auto* dir_opt = extract->add_option("--html-dir", html_dir, ".html files with .meta sidecars");
    extract->add_option("--output", output_path, "output JSONL")->required();
    extract->add_option("--rejects", rejects_path, "dropped-page report (url TAB reason)");
    extract->add_option("--ad-patterns", ad_patterns_path, "ad URL pattern list, one per line");
    unsigned x_workers = 1;
    extract->add_option("--workers", x_workers, "extraction worker count");
    warc_opt->excludes(dir_opt);

    // filter
    std::string f_input, f_output, f_rules, f_rejects;
    bool f_no_preliminary = false, f_no_detailed = false;
    auto* filter = app.add_subcommand("filter", "preliminary and rule-based text filtering");
    filter->require_subcommand(1);
    auto* frun = filter->add_subcommand("run", "apply filters to a corpus");
    frun->add_option("--input", f_input)->required();
    frun->add_option("--output", f_output)->required();
    frun->add_option("--rules", f_rules, "rule set TOML (default: builtin English rules)");
    frun->add_option("--rejects", f_rejects);
    frun->add_flag("--no-preliminary", f_no_preliminary);
    frun->add_flag("--no-detailed", f_no_detailed);

    std::string e_input, e_rules, e_annotations, e_output;
    auto* feval = filter->add_subcommand("eval", "trigger ratio and FPR per rule");
    feval->add_option("--input", e_input)->required();
    feval->add_option("--rules", e_rules);
    feval->add_option("--annotations", e_annotations, "JSONL {doc_id, verdict, problem?}")->required();
    feval->add_option("--output", e_output, "TSV output (default stdout)");

    std::string fb_input, fb_candidates, fb_annotations, fb_output, fb_review;
    double fb_threshold = 0.05;
    uint64_t fb_seed = 0;
    size_t fb_n = 1000;
    auto* ffb = filter->add_subcommand("feedback", "one human-feedback iteration");
    ffb->add_option("--input", fb_input)->required();
    ffb->add_option("--candidates", fb_candidates, "candidate rule set TOML")->required();
    ffb->add_option("--annotations", fb_annotations);
    ffb->add_option("--threshold", fb_threshold, "promotion FPR threshold");
    ffb->add_option("--seed", fb_seed);
    ffb->add_option("--sample-size", fb_n);
    ffb->add_option("--output", fb_output, "next-iteration corpus JSONL");
    ffb->add_option("--review", fb_review, "review sheet JSONL");

    // dedup
    std::string d_input, d_output, d_report;
    double d_threshold = 0.8;
    int d_k = 256, d_w = 5, d_bands = 32, d_rows = 8;
    uint64_t d_seed = 0;
    auto* dedup_cmd = app.add_subcommand("dedup", "near-duplicate removal, keep latest");
    dedup_cmd->add_option("--input", d_input)->required();
    dedup_cmd->add_option("--output", d_output)->required();
    dedup_cmd->add_option("--report", d_report, "duplicate groups JSONL");
    dedup_cmd->add_option("--threshold", d_threshold);
    dedup_cmd->add_option("--minhash-k", d_k);
    dedup_cmd->add_option("--shingle-width", d_w);
    dedup_cmd->add_option("--bands", d_bands);
    dedup_cmd->add_option("--rows", d_rows);
    dedup_cmd->add_option("--seed", d_seed);

    // images
    std::string i_input, i_output, i_root, i_report;
    uint64_t i_bloom_bits = 1u << 22;
    int i_bloom_hashes = 7;
    int64_t i_occurrence = 10;
    bool i_hard_drop = false;
    uint64_t i_seed = 0;
    unsigned i_workers = 1;
    auto* images = app.add_subcommand("images", "download, score, filter, and fingerprint images");
    images->add_option("--input", i_input)->required();
    images->add_option("--output", i_output)->required();
    images->add_option("--root", i_root, "file-fetcher root (default: plain http)");
    images->add_option("--bloom-bits", i_bloom_bits);
    images->add_option("--bloom-hashes", i_bloom_hashes);
    images->add_option("--occurrence-limit", i_occurrence);
    images->add_flag("--hard-drop", i_hard_drop);
    images->add_option("--report", i_report);
    images->add_option("--seed", i_seed);
    images->add_option("--workers", i_workers);

    // schedule
    std::string s_profiles;
    double s_docs = 1e9;
    auto* schedule = app.add_subcommand("schedule", "stage-ordering cost model");
    schedule->add_option("--profiles", s_profiles, "stage profiles TOML (default: built-in)");
    schedule->add_option("--docs", s_docs, "document count to model");

    // stats
    std::string st_input, st_hist, st_joint;
    auto* stats = app.add_subcommand("stats", "per-document quality metrics and histograms");
    stats->add_option("--input", st_input)->required();
    stats->add_option("--histograms", st_hist, "TSV output (default stdout)");
    stats->add_option("--joint", st_joint, "image/token joint table JSON (default stdout)");

    // run
    std::string r_config, r_input, r_output, r_report;
    std::optional<uint64_t> r_seed;
    std::optional<unsigned> r_workers;
    bool r_hard_drop = false;
    auto* run = app.add_subcommand("run", "full pipeline over a JSONL corpus");
    run->add_option("--config", r_config, "pipeline config TOML");
    run->add_option("--seed", r_seed);
    run->add_option("--workers", r_workers);
    run->add_flag("--hard-drop", r_hard_drop);
    run->add_option("--input", r_input);
    run->add_option("--output", r_output);
    run->add_option("--report", r_report);

    CLI11_PARSE(app, argc, argv);

    try {
        if (extract->parsed()) {
            if (warc_path.empty() && html_dir.empty())
                throw ConfigExit("extract needs --warc or --html-dir");
            return cmd_extract(warc_path, html_dir, output_path, rejects_path, ad_patterns_path,
                               x_workers);
        }
        if (filter->parsed()) {
            if (frun->parsed())
                return cmd_filter_run(f_input, f_output, f_rules, f_rejects, f_no_preliminary,
                                      f_no_detailed);
            if (feval->parsed()) return cmd_filter_eval(e_input, e_rules, e_annotations, e_output);
            if (ffb->parsed())
                return cmd_filter_feedback(fb_input, fb_candidates, fb_annotations, fb_threshold,
                                           fb_seed, fb_n, fb_output, fb_review);
        }
        if (dedup_cmd->parsed())
            return cmd_dedup(d_input, d_output, d_report, d_threshold, d_k, d_w, d_bands, d_rows,
                             d_seed);
        if (images->parsed())
            return cmd_images(i_input, i_output, i_root, i_bloom_bits, i_bloom_hashes, i_occurrence,
                              i_hard_drop, i_report, i_seed, i_workers);
        if (schedule->parsed()) return cmd_schedule(s_profiles, s_docs);
        if (stats->parsed()) return cmd_stats(st_input, st_hist, st_joint);
        if (run->parsed())
            return cmd_run(r_config, r_seed, r_workers, r_hard_drop, r_input, r_output, r_report);
    } catch (const ConfigExit& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const PipelineConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const FilterConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const toml::ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const PlanError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
