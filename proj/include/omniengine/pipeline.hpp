#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "omniengine/dedup.hpp"
#include "omniengine/image_pipeline.hpp"
#include "omniengine/stream_format.hpp"
#include "omniengine/text_filters.hpp"
#include "omniengine/toml.hpp"

namespace omni {

class PipelineConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PipelineConfig {
    // Stage toggles. Default composition runs all four; the image and
    // detailed stages annotate rather than delete unless hard_drop is set
    // (they share the dedup stage's input, mirroring a parallel group).
    bool preliminary = true;
    bool dedup = true;
    bool images = true;
    bool detailed = true;
    bool hard_drop = false;

    uint64_t seed = 0;
    unsigned workers = 1;
    size_t queue_capacity = 1024;

    std::string input_path;
    std::string output_path;
    std::string report_path;
    std::string rejects_path;

    PreliminaryConfig preliminary_config;
    DedupConfig dedup_config;
    std::string ruleset_path;  // empty = builtin English rules

    std::string image_root;  // file-fetcher root; empty = plain http transport
    ImageFilterConfig image_filter;
    FetchConfig fetch;
    uint64_t bloom_bits = 1u << 22;
    int bloom_hashes = 7;
    int64_t occurrence_limit = 10;
};

// TOML = the on-disk config format; paths are validated at load.
PipelineConfig load_pipeline_config(const toml::Table& config);
PipelineConfig load_pipeline_config_file(const std::string& path);

struct StageReport {
    std::string stage;
    int64_t input_docs = 0;
    int64_t output_docs = 0;
    double removal_fraction = 0.0;
    double wall_seconds = 0.0;
};

struct RunReport {
    std::vector<StageReport> stages;
    std::map<std::string, int64_t> rule_triggers;
    uint64_t urls_seen = 0;
    uint64_t urls_deduped = 0;
    uint64_t images_fetched = 0;
    uint64_t images_failed = 0;
    int64_t quarantined_lines = 0;

    std::string to_json() const;
};

struct RejectedDocument {
    StreamDocument doc;
    std::string stage;
    std::string reason;
};

struct PipelineOutcome {
    std::vector<StreamDocument> output;   // sorted by id
    std::vector<RejectedDocument> rejects;  // sorted by id
    RunReport report;
};

// Core engine: documents in, survivors/rejects/report out. Deterministic for
// a fixed (input, config, seed) for any worker count. The fetcher override
// exists for tests; by default the config picks a file or http transport.
PipelineOutcome run_pipeline_on(std::vector<StreamDocument> docs, const PipelineConfig& config,
                                Fetcher* fetcher_override = nullptr);

// File-to-file wrapper: reads JSONL (quarantining malformed lines), runs the
// engine, writes output, rejects, and the report JSON.
RunReport run_pipeline(const PipelineConfig& config);

// --- JSONL corpus streaming -------------------------------------------------

struct QuarantinedLine {
    int64_t line_number = 0;
    std::string error;
    std::string raw;
};

struct CorpusLoad {
    std::vector<StreamDocument> docs;
    std::vector<QuarantinedLine> quarantined;
};

CorpusLoad read_jsonl_corpus(std::istream& in);
void write_jsonl_corpus(std::ostream& out, const std::vector<StreamDocument>& docs);

// --- Logging -----------------------------------------------------------------

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// Level comes from OMNIENGINE_LOG (error|warn|info|debug); default warn.
void log(LogLevel level, const std::string& message);

}  // namespace omni
