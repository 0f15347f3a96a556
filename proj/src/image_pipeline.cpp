#include "omniengine/image_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <httplib.h>

#include "omniengine/hash.hpp"
#include "omniengine/url.hpp"

namespace omni {

// --- BloomFilter ------------------------------------------------------------

BloomFilter::BloomFilter(uint64_t bit_count, int hash_count, uint64_t seed)
    : bits_(bit_count), hashes_(hash_count), seed_(seed) {
    if (bit_count == 0 || hash_count < 1) throw std::invalid_argument("bad bloom geometry");
    words_.assign((bit_count + 63) / 64, 0);
}

uint64_t BloomFilter::probe(std::string_view element, int index) const {
    // Double hashing: h1 + i*h2 covers the k probes from two base hashes.
    uint64_t h1 = hash64_indexed(seed_, 0, element);
    uint64_t h2 = hash64_indexed(seed_, 1, element) | 1;  // odd, so it cycles
    return (h1 + static_cast<uint64_t>(index) * h2) % bits_;
}

void BloomFilter::insert(std::string_view element) {
    for (int i = 0; i < hashes_; ++i) {
        uint64_t bit = probe(element, i);
        words_[bit / 64] |= 1ULL << (bit % 64);
    }
    ++inserted_;
}

bool BloomFilter::possibly_present(std::string_view element) const {
    for (int i = 0; i < hashes_; ++i) {
        uint64_t bit = probe(element, i);
        if (!(words_[bit / 64] & (1ULL << (bit % 64)))) return false;
    }
    return true;
}

double BloomFilter::theoretical_fpr(uint64_t n, uint64_t m, int k) {
    if (m == 0 || k < 1) return 1.0;
    double exponent = -static_cast<double>(k) * static_cast<double>(n) / static_cast<double>(m);
    return std::pow(1.0 - std::exp(exponent), k);
}

// --- StubScorer ---------------------------------------------------------------

StubScorer::StubScorer(ImageDecoder decoder) : decoder_(std::move(decoder)) {}

double StubScorer::aesthetic(std::string_view image_bytes) const {
    auto decoded = decoder_(image_bytes, "");
    if (!decoded || decoded->pixels.empty()) return 0.0;
    auto [lo, hi] = std::minmax_element(decoded->pixels.begin(), decoded->pixels.end());
    return 10.0 * static_cast<double>(*hi - *lo) / 255.0;
}

double StubScorer::nsfw(std::string_view) const { return 0.0; }

// --- filter_image -------------------------------------------------------------

std::string_view to_string(ImageDropReason reason) {
    switch (reason) {
        case ImageDropReason::MinDim: return "min_dim";
        case ImageDropReason::Aspect: return "aspect";
        case ImageDropReason::Aesthetic: return "aesthetic";
        case ImageDropReason::Nsfw: return "nsfw";
    }
    return "unknown";
}

std::optional<ImageDropReason> filter_image(const ImageRef& ref, const ImageFilterConfig& config) {
    if (ref.width <= 0 || ref.height <= 0)
        throw std::invalid_argument("filter_image requires positive dimensions");
    if (std::min(ref.width, ref.height) < config.min_dimension) return ImageDropReason::MinDim;
    double aspect = static_cast<double>(ref.width) / static_cast<double>(ref.height);
    if (aspect > config.max_aspect || aspect < config.min_aspect) return ImageDropReason::Aspect;
    if (ref.aesthetic != kUnscored && ref.aesthetic < config.min_aesthetic)
        return ImageDropReason::Aesthetic;
    if (ref.nsfw != kUnscored && ref.nsfw > config.max_nsfw) return ImageDropReason::Nsfw;
    return std::nullopt;
}

// --- Fetchers -----------------------------------------------------------------

FileFetcher::FileFetcher(std::string root) : root_(std::move(root)) {}

std::variant<FetchResponse, FetchFailure> FileFetcher::request(const std::string& url) {
    auto parsed = parse_url(url);
    if (!parsed) return FetchFailure{FailureClass::Permanent, "unparsable url"};
    std::filesystem::path path = std::filesystem::path(root_);
    if (!parsed->host.empty()) path /= parsed->host;
    std::string rel = parsed->path.empty() ? "/" : parsed->path;
    path += rel;
    std::ifstream in(path, std::ios::binary);
    if (!in) return FetchFailure{FailureClass::Permanent, "not found: " + path.string()};
    std::ostringstream buf;
    buf << in.rdbuf();
    FetchResponse response{buf.str(), ""};
    if (path.extension() == ".pgm") response.content_type = "image/x-portable-graymap";
    return response;
}

HttpFetcher::HttpFetcher(int timeout_seconds) : timeout_seconds_(timeout_seconds) {}

std::variant<FetchResponse, FetchFailure> HttpFetcher::request(const std::string& url) {
    auto parsed = parse_url(url);
    if (!parsed) return FetchFailure{FailureClass::Permanent, "unparsable url"};
    if (parsed->scheme != "http")
        return FetchFailure{FailureClass::Permanent, "unsupported scheme: " + parsed->scheme};
    int port = parsed->port > 0 ? parsed->port : 80;
    httplib::Client client(parsed->host, port);
    client.set_connection_timeout(timeout_seconds_);
    client.set_read_timeout(timeout_seconds_);
    std::string target = parsed->path.empty() ? "/" : parsed->path;
    if (!parsed->query.empty()) target += "?" + parsed->query;
    auto result = client.Get(target);
    if (!result) return FetchFailure{FailureClass::Transient, httplib::to_string(result.error())};
    if (result->status >= 500)
        return FetchFailure{FailureClass::Transient, "http " + std::to_string(result->status)};
    if (result->status >= 400)
        return FetchFailure{FailureClass::Permanent, "http " + std::to_string(result->status)};
    return FetchResponse{result->body, result->get_header_value("Content-Type")};
}

// --- fetch_images ---------------------------------------------------------------

FetchTask make_fetch_task(std::string_view raw_url, std::string referer_doc_id) {
    FetchTask task;
    task.url = normalize_url(raw_url);
    task.referer_doc_id = std::move(referer_doc_id);
    return task;
}

namespace {

struct FetchJob {
    std::string url;
    std::string host;
    std::shared_ptr<FetchOutcome> outcome;
};

void run_job(FetchJob& job, Fetcher& fetcher, const FetchConfig& config, uint64_t& transport_calls,
             std::mutex& stats_mutex) {
    FetchOutcome& out = *job.outcome;
    for (int attempt = 1; attempt <= 1 + config.max_retries; ++attempt) {
        {
            std::lock_guard lock(stats_mutex);
            ++transport_calls;
        }
        out.attempts = attempt;
        auto result = fetcher.request(job.url);
        if (auto* response = std::get_if<FetchResponse>(&result)) {
            if (response->bytes.size() > config.max_body_bytes) {
                out.kind = FetchOutcomeKind::Failed;
                out.failure_class = FailureClass::Permanent;
                out.error = "body exceeds cap (" + std::to_string(response->bytes.size()) + " bytes)";
                return;
            }
            out.kind = FetchOutcomeKind::Fetched;
            out.bytes = std::move(response->bytes);
            out.content_type = std::move(response->content_type);
            out.error.clear();
            return;
        }
        auto& failure = std::get<FetchFailure>(result);
        out.kind = FetchOutcomeKind::Failed;
        out.failure_class = failure.cls;
        out.error = failure.message;
        if (failure.cls == FailureClass::Permanent) return;
    }
}

}  // namespace

FetchReport fetch_images(const std::vector<FetchTask>& tasks, Fetcher& fetcher, BloomFilter& bloom,
                         const FetchConfig& config) {
    FetchReport report;
    report.urls_seen = tasks.size();

    // One job per distinct normalized URL not already bloom-known.
    std::unordered_map<std::string, std::shared_ptr<FetchOutcome>> outcomes;
    std::vector<FetchJob> jobs;
    auto skipped = std::make_shared<FetchOutcome>();
    skipped->kind = FetchOutcomeKind::SkippedDuplicate;

    for (const FetchTask& task : tasks) {
        auto it = outcomes.find(task.url);
        if (it != outcomes.end()) {
            ++report.urls_deduped;
            continue;
        }
        if (bloom.possibly_present(task.url)) {
            outcomes.emplace(task.url, skipped);
            ++report.urls_deduped;
            continue;
        }
        bloom.insert(task.url);
        auto outcome = std::make_shared<FetchOutcome>();
        outcomes.emplace(task.url, outcome);
        auto parsed = parse_url(task.url);
        jobs.push_back({task.url, parsed ? parsed->host : "", outcome});
    }

    // Worker pool with a per-host in-flight cap.
    std::mutex mutex;
    std::condition_variable cv;
    std::unordered_map<std::string, int> in_flight;
    std::vector<bool> claimed(jobs.size(), false);
    size_t completed = 0;
    std::mutex stats_mutex;

    auto worker = [&] {
        std::unique_lock lock(mutex);
        for (;;) {
            size_t index = jobs.size();
            for (size_t i = 0; i < jobs.size(); ++i) {
                if (!claimed[i] && in_flight[jobs[i].host] < config.per_host_limit) {
                    index = i;
                    break;
                }
            }
            if (index == jobs.size()) {
                if (completed == jobs.size()) return;
                cv.wait(lock);
                continue;
            }
            claimed[index] = true;
            ++in_flight[jobs[index].host];
            lock.unlock();
            run_job(jobs[index], fetcher, config, report.transport_calls, stats_mutex);
            lock.lock();
            --in_flight[jobs[index].host];
            ++completed;
            cv.notify_all();
        }
    };

    unsigned n = std::max(1u, std::min<unsigned>(config.workers, static_cast<unsigned>(jobs.size())));
    if (n == 1) {
        for (auto& job : jobs) run_job(job, fetcher, config, report.transport_calls, stats_mutex);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n);
        for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (const FetchTask& task : tasks) {
        auto outcome = outcomes.at(task.url);
        FetchTask annotated = task;
        annotated.attempts = outcome->attempts;
        switch (outcome->kind) {
            case FetchOutcomeKind::Fetched:
                annotated.status = ImageStatus::fetched();
                ++report.fetched;
                break;
            case FetchOutcomeKind::Failed:
                annotated.status = ImageStatus::failed();
                ++report.failed;
                break;
            case FetchOutcomeKind::SkippedDuplicate:
                annotated.status = ImageStatus::dropped("duplicate_url");
                break;
        }
        report.results.emplace_back(std::move(annotated), outcome);
    }
    return report;
}

}  // namespace omni
