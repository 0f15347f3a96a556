#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "omniengine/image.hpp"
#include "omniengine/stream_format.hpp"

namespace omni {

// --- Bloom filter -----------------------------------------------------------

// Bit-array membership sketch over strings. No false negatives, ever; the
// false-positive rate is (1 - e^(-k*n/m))^k.
class BloomFilter {
public:
    BloomFilter(uint64_t bit_count, int hash_count, uint64_t seed = 0);

    void insert(std::string_view element);
    // false means definitely absent; true means possibly present.
    bool possibly_present(std::string_view element) const;

    uint64_t bit_count() const { return bits_; }
    int hash_count() const { return hashes_; }
    uint64_t inserted() const { return inserted_; }

    double theoretical_fpr() const { return theoretical_fpr(inserted_, bits_, hashes_); }
    static double theoretical_fpr(uint64_t n, uint64_t m, int k);

private:
    uint64_t probe(std::string_view element, int index) const;

    uint64_t bits_;
    int hashes_;
    uint64_t seed_;
    uint64_t inserted_ = 0;
    std::vector<uint64_t> words_;
};

// --- Scoring ----------------------------------------------------------------

// Model-backed scorers plug in here; implementations must be pure and
// deterministic for fixed input bytes.
class ScorerInterface {
public:
    virtual ~ScorerInterface() = default;
    virtual double aesthetic(std::string_view image_bytes) const = 0;  // [0,10]
    virtual double nsfw(std::string_view image_bytes) const = 0;       // [0,1]
};

// Deterministic stand-in: aesthetic = 10 * (pixel value range used)/255 on
// the decoded image (0 when undecodable), nsfw = 0. Exists so end-to-end
// runs reproduce without any model.
class StubScorer : public ScorerInterface {
public:
    explicit StubScorer(ImageDecoder decoder = default_decoder());
    double aesthetic(std::string_view image_bytes) const override;
    double nsfw(std::string_view image_bytes) const override;

private:
    ImageDecoder decoder_;
};

// --- Dimension/score filtering ----------------------------------------------

struct ImageFilterConfig {
    int min_dimension = 150;      // "fewer than 150 pixels" drops
    double max_aspect = 2.0;      // "greater than 2" drops
    double min_aspect = 0.5;      // "less than 0.5" drops
    double min_aesthetic = 3.7;   // "below 3.7" drops
    double max_nsfw = 0.8;        // "above 0.8" drops
};

enum class ImageDropReason { MinDim, Aspect, Aesthetic, Nsfw };
std::string_view to_string(ImageDropReason reason);

// First failing check in order MinDim, Aspect, Aesthetic, Nsfw; nullopt =
// keep. All comparisons are strict, so values exactly at a threshold stay.
// Unscored (-1) values skip their check. Throws on nonpositive dimensions.
std::optional<ImageDropReason> filter_image(const ImageRef& ref,
                                            const ImageFilterConfig& config = {});

// --- Fetching ---------------------------------------------------------------

enum class FailureClass { Transient, Permanent };

struct FetchResponse {
    std::string bytes;
    std::string content_type;
};

struct FetchFailure {
    FailureClass cls = FailureClass::Permanent;
    std::string message;
};

// Transport contract: one request, one response or typed failure. No retry
// logic inside implementations.
class Fetcher {
public:
    virtual ~Fetcher() = default;
    virtual std::variant<FetchResponse, FetchFailure> request(const std::string& url) = 0;
};

// Serves file:// and http(s) URLs from a directory root: the URL path maps
// onto root/<host>/<path>. Missing files are permanent failures.
class FileFetcher : public Fetcher {
public:
    explicit FileFetcher(std::string root);
    std::variant<FetchResponse, FetchFailure> request(const std::string& url) override;

private:
    std::string root_;
};

// Plain HTTP transport (cpp-httplib). 4xx permanent, 5xx/connection errors
// transient.
class HttpFetcher : public Fetcher {
public:
    explicit HttpFetcher(int timeout_seconds = 10);
    std::variant<FetchResponse, FetchFailure> request(const std::string& url) override;

private:
    int timeout_seconds_;
};

struct FetchTask {
    std::string url;  // normalized
    std::string referer_doc_id;
    int attempts = 0;
    ImageStatus status = ImageStatus::pending();
};

// Normalizes the raw URL (lowercased scheme/host, default port and fragment
// stripped, query kept).
FetchTask make_fetch_task(std::string_view raw_url, std::string referer_doc_id);

struct FetchConfig {
    int max_retries = 2;  // retries on transient failures (attempts <= 1 + retries)
    uint64_t max_body_bytes = 20ull * 1024 * 1024;
    int per_host_limit = 4;
    unsigned workers = 8;
};

enum class FetchOutcomeKind {
    Fetched,
    Failed,
    SkippedDuplicate,  // normalized URL was already in the bloom filter
};

struct FetchOutcome {
    FetchOutcomeKind kind = FetchOutcomeKind::Failed;
    std::string bytes;
    std::string content_type;
    std::string error;
    FailureClass failure_class = FailureClass::Permanent;
    int attempts = 0;
};

struct FetchReport {
    std::vector<std::pair<FetchTask, std::shared_ptr<const FetchOutcome>>> results;
    uint64_t urls_seen = 0;       // tasks in
    uint64_t urls_deduped = 0;    // shared an outcome or were bloom-gated
    uint64_t transport_calls = 0; // requests issued, retries included
    uint64_t fetched = 0;
    uint64_t failed = 0;
};

// Fetches each distinct normalized URL at most once per run; URLs already in
// the bloom filter are skipped entirely. Tasks with the same URL share one
// outcome. Honors the per-host in-flight limit and the global worker count.
FetchReport fetch_images(const std::vector<FetchTask>& tasks, Fetcher& fetcher, BloomFilter& bloom,
                         const FetchConfig& config = {});

}  // namespace omni
