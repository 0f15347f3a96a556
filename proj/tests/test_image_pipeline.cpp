#include <doctest.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <thread>
#include <unordered_set>

#include "omniengine/image_pipeline.hpp"
#include "omniengine/url.hpp"

using namespace omni;

namespace {

// In-memory transport with scripted behavior per URL.
class ScriptedFetcher : public Fetcher {
public:
    std::unordered_map<std::string, std::variant<FetchResponse, FetchFailure>> script;
    // Transient failures to serve before success, per URL.
    std::unordered_map<std::string, int> flaky;
    std::atomic<int> calls{0};

    std::variant<FetchResponse, FetchFailure> request(const std::string& url) override {
        ++calls;
        auto flaky_it = flaky.find(url);
        if (flaky_it != flaky.end() && flaky_it->second > 0) {
            --flaky_it->second;
            return FetchFailure{FailureClass::Transient, "flaky"};
        }
        auto it = script.find(url);
        if (it == script.end()) return FetchFailure{FailureClass::Permanent, "not scripted"};
        return it->second;
    }
};

// Tracks the maximum concurrent in-flight requests per host.
class ConcurrencyProbe : public Fetcher {
public:
    std::mutex mutex;
    std::unordered_map<std::string, int> current, peak;

    std::variant<FetchResponse, FetchFailure> request(const std::string& url) override {
        std::string host = parse_url(url)->host;
        {
            std::lock_guard lock(mutex);
            peak[host] = std::max(peak[host], ++current[host]);
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
        {
            std::lock_guard lock(mutex);
            --current[host];
        }
        return FetchResponse{"bytes", "image/x-portable-graymap"};
    }
};

ImageRef ref_of(int width, int height, double aesthetic = kUnscored, double nsfw = kUnscored) {
    ImageRef ref;
    ref.url = "http://img.example/x.png";
    ref.width = width;
    ref.height = height;
    ref.aesthetic = aesthetic;
    ref.nsfw = nsfw;
    return ref;
}

}  // namespace

TEST_SUITE("image_pipeline") {

TEST_CASE("bloom: inserted elements are always possibly present") {
    BloomFilter bloom(1024, 4);
    CHECK_FALSE(bloom.possibly_present("http://u.example/a"));
    bloom.insert("http://u.example/a");
    CHECK(bloom.possibly_present("http://u.example/a"));
}

TEST_CASE("bloom: theoretical fpr formula") {
    // (1 - e^(-7*1000/9585))^7, evaluated independently here.
    double expected = std::pow(1.0 - std::exp(-7.0 * 1000.0 / 9585.0), 7.0);
    CHECK(expected == doctest::Approx(0.0100).epsilon(0.05));
    CHECK(BloomFilter::theoretical_fpr(1000, 9585, 7) == doctest::Approx(expected));
}

TEST_CASE("bloom: measured fpr within 30 percent of theory") {
    BloomFilter bloom(9585, 7);
    for (int i = 0; i < 1000; ++i) bloom.insert("member-" + std::to_string(i));
    int false_positives = 0;
    const int probes = 100000;
    for (int i = 0; i < probes; ++i) {
        if (bloom.possibly_present("fresh-" + std::to_string(i))) ++false_positives;
    }
    double measured = static_cast<double>(false_positives) / probes;
    double theoretical = bloom.theoretical_fpr();
    CHECK(measured == doctest::Approx(theoretical).epsilon(0.30));
}

TEST_CASE("property: no false negatives over random interleaved ops") {
    std::mt19937_64 rng(8675309);
    BloomFilter bloom(4096, 4);
    std::unordered_set<std::string> inserted;
    for (int op = 0; op < 10000; ++op) {
        std::string key = "k" + std::to_string(rng() % 2000);
        if (rng() % 2) {
            bloom.insert(key);
            inserted.insert(key);
        } else if (inserted.count(key)) {
            CHECK(bloom.possibly_present(key));
        }
    }
    for (const auto& key : inserted) CHECK(bloom.possibly_present(key));
}

TEST_CASE("stub scorer is deterministic and range-derived") {
    StubScorer scorer;
    PixelImage flat = PixelImage::filled(8, 8, 77);
    CHECK(scorer.aesthetic(encode_pgm(flat)) == doctest::Approx(0.0));
    PixelImage contrast = PixelImage::filled(8, 8, 0);
    contrast.at(0, 0) = 255;
    CHECK(scorer.aesthetic(encode_pgm(contrast)) == doctest::Approx(10.0));
    CHECK(scorer.nsfw(encode_pgm(contrast)) == doctest::Approx(0.0));
    CHECK(scorer.aesthetic("not an image") == doctest::Approx(0.0));
}

TEST_CASE("filter_image: boundary pairs straddle keep/drop") {
    // 149 px fails, 150 px passes the minimum-dimension check.
    CHECK(filter_image(ref_of(149, 300)) == ImageDropReason::MinDim);
    CHECK(filter_image(ref_of(150, 300)) == std::nullopt);
    CHECK(filter_image(ref_of(100, 200)) == ImageDropReason::MinDim);

    // Aspect exactly 2.0 and 0.5 survive; beyond is dropped.
    CHECK(filter_image(ref_of(400, 200)) == std::nullopt);
    CHECK(filter_image(ref_of(402, 200)) == ImageDropReason::Aspect);
    CHECK(filter_image(ref_of(200, 400)) == std::nullopt);
    CHECK(filter_image(ref_of(196, 400)) == ImageDropReason::Aspect);
    CHECK(filter_image(ref_of(400, 150)) == ImageDropReason::Aspect);  // 2.67

    // Aesthetic: strictly below 3.7 drops.
    CHECK(filter_image(ref_of(300, 300, 3.69)) == ImageDropReason::Aesthetic);
    CHECK(filter_image(ref_of(300, 300, 3.70)) == std::nullopt);
    CHECK(filter_image(ref_of(300, 300, 3.6)) == ImageDropReason::Aesthetic);
    CHECK(filter_image(ref_of(300, 300, 3.8, 0.1)) == std::nullopt);

    // NSFW: strictly above 0.8 drops.
    CHECK(filter_image(ref_of(300, 300, 5.0, 0.80)) == std::nullopt);
    CHECK(filter_image(ref_of(300, 300, 5.0, 0.81)) == ImageDropReason::Nsfw);

    // Unscored sentinel skips score checks.
    CHECK(filter_image(ref_of(300, 300)) == std::nullopt);

    CHECK_THROWS_AS(filter_image(ref_of(0, 100)), std::invalid_argument);
}

TEST_CASE("filter_image reports the first failing check") {
    // Fails MinDim and Aesthetic; MinDim wins.
    CHECK(filter_image(ref_of(100, 100, 1.0)) == ImageDropReason::MinDim);
}

TEST_CASE("same URL with differing fragments fetches once") {
    ScriptedFetcher fetcher;
    fetcher.script["http://img.example/a.png"] = FetchResponse{"DATA", "image/png"};
    BloomFilter bloom(4096, 4);
    std::vector<FetchTask> tasks = {
        make_fetch_task("http://img.example/a.png#top", "d1"),
        make_fetch_task("http://IMG.example/a.png#bottom", "d2"),
    };
    auto report = fetch_images(tasks, fetcher, bloom, {});
    CHECK(fetcher.calls == 1);
    CHECK(report.transport_calls == 1);
    REQUIRE(report.results.size() == 2);
    CHECK(report.results[0].second == report.results[1].second);  // shared outcome
    CHECK(report.results[0].second->bytes == "DATA");
    CHECK(report.urls_deduped == 1);
}

TEST_CASE("file fetcher serves three distinct URLs") {
    namespace fs = std::filesystem;
    fs::path root = fs::temp_directory_path() / "omni_fetch_test";
    fs::create_directories(root / "img.example");
    for (const char* name : {"a.pgm", "b.pgm", "c.pgm"}) {
        std::ofstream out(root / "img.example" / name, std::ios::binary);
        out << encode_pgm(PixelImage::filled(4, 4, 9));
    }
    FileFetcher fetcher(root.string());
    BloomFilter bloom(4096, 4);
    std::vector<FetchTask> tasks;
    for (const char* name : {"a.pgm", "b.pgm", "c.pgm"}) {
        tasks.push_back(make_fetch_task("http://img.example/" + std::string(name), "d"));
    }
    auto report = fetch_images(tasks, fetcher, bloom, {});
    CHECK(report.fetched == 3);
    for (const auto& [task, outcome] : report.results) {
        CHECK(outcome->kind == FetchOutcomeKind::Fetched);
        CHECK_FALSE(outcome->bytes.empty());
        CHECK(task.status == ImageStatus::fetched());
    }
    fs::remove_all(root);
}

TEST_CASE("permanent failures are not retried") {
    ScriptedFetcher fetcher;
    fetcher.script["http://img.example/missing.png"] =
        FetchFailure{FailureClass::Permanent, "NotFound"};
    BloomFilter bloom(4096, 4);
    auto report = fetch_images({make_fetch_task("http://img.example/missing.png", "d")}, fetcher,
                               bloom, {});
    REQUIRE(report.results.size() == 1);
    CHECK(report.results[0].second->kind == FetchOutcomeKind::Failed);
    CHECK(report.results[0].second->attempts == 1);
    CHECK(report.results[0].first.status == ImageStatus::failed());
}

TEST_CASE("transient failures retry up to the configured budget") {
    ScriptedFetcher fetcher;
    fetcher.script["http://img.example/slow.png"] = FetchResponse{"OK", ""};
    fetcher.flaky["http://img.example/slow.png"] = 2;
    BloomFilter bloom(4096, 4);
    FetchConfig config;
    config.max_retries = 2;
    auto report =
        fetch_images({make_fetch_task("http://img.example/slow.png", "d")}, fetcher, bloom, config);
    CHECK(report.results[0].second->kind == FetchOutcomeKind::Fetched);
    CHECK(report.results[0].second->attempts == 3);

    // With only one retry the same script exhausts the budget.
    ScriptedFetcher fetcher2;
    fetcher2.script["http://img.example/slow.png"] = FetchResponse{"OK", ""};
    fetcher2.flaky["http://img.example/slow.png"] = 2;
    BloomFilter bloom2(4096, 4);
    FetchConfig tight;
    tight.max_retries = 1;
    auto report2 =
        fetch_images({make_fetch_task("http://img.example/slow.png", "d")}, fetcher2, bloom2, tight);
    CHECK(report2.results[0].second->kind == FetchOutcomeKind::Failed);
    CHECK(report2.results[0].second->attempts == 2);
}

TEST_CASE("oversized bodies become permanent failures") {
    ScriptedFetcher fetcher;
    fetcher.script["http://img.example/huge.bin"] = FetchResponse{std::string(2048, 'x'), ""};
    BloomFilter bloom(4096, 4);
    FetchConfig config;
    config.max_body_bytes = 1024;
    auto report =
        fetch_images({make_fetch_task("http://img.example/huge.bin", "d")}, fetcher, bloom, config);
    CHECK(report.results[0].second->kind == FetchOutcomeKind::Failed);
    CHECK(report.results[0].second->failure_class == FailureClass::Permanent);
}

TEST_CASE("bloom gates URLs fetched in earlier runs") {
    ScriptedFetcher fetcher;
    fetcher.script["http://img.example/a.png"] = FetchResponse{"DATA", ""};
    BloomFilter bloom(4096, 4);
    auto first = fetch_images({make_fetch_task("http://img.example/a.png", "d")}, fetcher, bloom, {});
    CHECK(first.fetched == 1);
    auto second = fetch_images({make_fetch_task("http://img.example/a.png", "d")}, fetcher, bloom, {});
    CHECK(second.fetched == 0);
    CHECK(second.results[0].second->kind == FetchOutcomeKind::SkippedDuplicate);
    CHECK(fetcher.calls == 1);
}

TEST_CASE("invariant: transport calls equal distinct new normalized URLs") {
    std::mt19937_64 rng(13);
    ScriptedFetcher fetcher;
    BloomFilter bloom(1u << 16, 5);
    std::vector<FetchTask> tasks;
    std::set<std::string> distinct;
    for (int i = 0; i < 200; ++i) {
        std::string url = "http://h" + std::to_string(rng() % 5) + ".example/img" +
                          std::to_string(rng() % 60) + ".png";
        fetcher.script[normalize_url(url)] = FetchResponse{"D", ""};
        tasks.push_back(make_fetch_task(url + "#frag" + std::to_string(i), "d"));
        distinct.insert(normalize_url(url));
    }
    // Pre-populate the bloom with a few known URLs.
    int preseeded = 0;
    for (const auto& url : distinct) {
        if (preseeded++ % 4 == 0) bloom.insert(url);
    }
    auto inserted_before = bloom.inserted();
    auto report = fetch_images(tasks, fetcher, bloom, {});
    CHECK(report.transport_calls == distinct.size() - inserted_before);
    CHECK(static_cast<uint64_t>(fetcher.calls.load()) == report.transport_calls);
}

TEST_CASE("per-host in-flight limit is respected") {
    ConcurrencyProbe probe;
    BloomFilter bloom(1u << 16, 5);
    std::vector<FetchTask> tasks;
    for (int i = 0; i < 24; ++i) {
        tasks.push_back(make_fetch_task(
            "http://host" + std::to_string(i % 2) + ".example/i" + std::to_string(i) + ".png", "d"));
    }
    FetchConfig config;
    config.per_host_limit = 3;
    config.workers = 16;
    auto report = fetch_images(tasks, probe, bloom, config);
    CHECK(report.fetched == 24);
    for (const auto& [host, peak] : probe.peak) CHECK(peak <= 3);
}

TEST_CASE("url normalization in task construction") {
    auto task = make_fetch_task("HTTP://CDN.Example.com:80/Path/img.PNG?v=2#x", "doc9");
    CHECK(task.url == "http://cdn.example.com/Path/img.PNG?v=2");
    CHECK(task.referer_doc_id == "doc9");
}

}  // TEST_SUITE
