#include <doctest.h>

#include <algorithm>
#include <random>

#include "omniengine/metrics.hpp"

using namespace omni;

namespace {

StreamDocument text_doc(std::vector<std::string> paragraphs, int images = 0) {
    StreamDocument doc;
    doc.id = "m1";
    doc.meta.source_url = "http://m.example/";
    for (auto& p : paragraphs) doc.elements.push_back({ElementTag::Text, std::move(p), std::nullopt});
    for (int i = 0; i < images; ++i) {
        ImageRef ref;
        ref.url = "http://m.example/i" + std::to_string(i) + ".png";
        doc.elements.push_back({ElementTag::Image, "", ref});
    }
    return doc;
}

}  // namespace

TEST_SUITE("metrics") {

// Hand count: 10 non-whitespace chars, one of them ".", 9 letters over
// 3 words, one sentence, one line.
TEST_CASE("hand-counted fixture: The cat sat.") {
    auto m = compute_metrics(text_doc({"The cat sat."}));
    CHECK(m.line_number == 1);
    CHECK(m.line_lengths == std::vector<int64_t>{3});
    CHECK(m.token_length == 3);
    CHECK(m.sentence_number == 1);
    CHECK(m.mean_word_length == doctest::Approx(3.0));
    CHECK(m.non_alpha_fraction == doctest::Approx(0.1));
    CHECK(m.unique_words_fraction == doctest::Approx(1.0));
    CHECK(m.stop_word_fraction == doctest::Approx(1.0 / 3.0));
    CHECK(m.symbol_to_word_ratio == doctest::Approx(0.0));
    CHECK(m.image_count == 0);
    CHECK_FALSE(m.degenerate);
}

// Hand count: stop words are {the, on, the} of 6 words.
TEST_CASE("hand-counted fixture: stop word fraction") {
    auto m = compute_metrics(text_doc({"the cat sat on the mat"}));
    CHECK(m.token_length == 6);
    CHECK(m.stop_word_fraction == doctest::Approx(0.5));
    CHECK(m.unique_words_fraction == doctest::Approx(5.0 / 6.0));
    CHECK(m.mean_word_length == doctest::Approx(17.0 / 6.0));
    CHECK(m.non_alpha_fraction == doctest::Approx(0.0));
    CHECK(m.sentence_number == 1);
}

// Hand count across two paragraphs and one image: 10 words on 3 lines,
// 49 non-whitespace chars (6 non-alphanumeric), 40 letters, 3 sentences,
// stop words {and, here}, symbols {#, ...}.
TEST_CASE("hand-counted fixture: symbols, lines, image") {
    auto m = compute_metrics(
        text_doc({"Numbers 123 and symbols # here...", "Second line!\nThird line?"}, 1));
    CHECK(m.line_number == 3);
    CHECK(m.line_lengths == std::vector<int64_t>{6, 2, 2});
    CHECK(m.token_length == 10);
    CHECK(m.non_alpha_fraction == doctest::Approx(6.0 / 49.0));
    CHECK(m.unique_words_fraction == doctest::Approx(1.0));
    CHECK(m.mean_word_length == doctest::Approx(4.0));
    CHECK(m.sentence_number == 3);
    CHECK(m.stop_word_fraction == doctest::Approx(0.2));
    CHECK(m.symbol_to_word_ratio == doctest::Approx(0.2));
    CHECK(m.image_count == 1);
}

TEST_CASE("empty text is degenerate, all zero") {
    auto m = compute_metrics(text_doc({}, 2));
    CHECK(m.degenerate);
    CHECK(m.token_length == 0);
    CHECK(m.line_number == 0);
    CHECK(m.unique_words_fraction == doctest::Approx(0.0));
    CHECK(m.stop_word_fraction == doctest::Approx(0.0));
    CHECK(m.image_count == 2);
}

TEST_CASE("histogram boundaries and open-ended bins") {
    std::vector<QualityMetrics> stream(3);
    stream[0].line_number = 1;
    stream[1].line_number = 1;
    stream[2].line_number = 5;
    auto agg = aggregate_metrics(stream, {{"line_number", {0, 2, 10}}});
    REQUIRE(agg.histograms.size() == 1);
    CHECK(agg.histograms[0].counts == std::vector<int64_t>{2, 1});

    // Outside the outermost edges: counted in the boundary bins.
    QualityMetrics low, high;
    low.line_number = -3;
    high.line_number = 50;
    auto agg2 = aggregate_metrics({low, high}, {{"line_number", {0, 2, 10}}});
    CHECK(agg2.histograms[0].counts == std::vector<int64_t>{1, 1});
}

TEST_CASE("empty stream gives all-zero histograms") {
    auto agg = aggregate_metrics({}, default_bin_specs());
    CHECK(agg.documents == 0);
    for (const auto& h : agg.histograms) {
        CHECK(h.total == 0);
        CHECK(std::all_of(h.counts.begin(), h.counts.end(), [](int64_t c) { return c == 0; }));
    }
    CHECK(agg.image_token_joint.empty());
}

TEST_CASE("joint table collects one cell for a uniform corpus") {
    std::vector<QualityMetrics> stream(40);
    for (auto& m : stream) {
        m.image_count = 3;
        m.token_length = 757;
    }
    auto agg = aggregate_metrics(stream, default_bin_specs());
    REQUIRE(agg.image_token_joint.size() == 1);
    CHECK(agg.image_token_joint.begin()->second == 40);
    CHECK(agg.image_token_joint.begin()->first.first == 3);
}

TEST_CASE("property: aggregation is shuffle invariant") {
    std::mt19937_64 rng(5150);
    std::vector<QualityMetrics> stream;
    for (int i = 0; i < 500; ++i) {
        QualityMetrics m;
        m.line_number = static_cast<int64_t>(rng() % 40);
        m.token_length = static_cast<int64_t>(rng() % 5000);
        m.image_count = static_cast<int64_t>(rng() % 8);
        m.stop_word_fraction = static_cast<double>(rng() % 100) / 100.0;
        stream.push_back(m);
    }
    auto a = aggregate_metrics(stream, default_bin_specs());
    std::shuffle(stream.begin(), stream.end(), rng);
    auto b = aggregate_metrics(stream, default_bin_specs());
    REQUIRE(a.histograms.size() == b.histograms.size());
    for (size_t i = 0; i < a.histograms.size(); ++i) CHECK(a.histograms[i].counts == b.histograms[i].counts);
    CHECK(a.image_token_joint == b.image_token_joint);
}

TEST_CASE("property: unique fraction times words is integral; tokens are additive") {
    std::mt19937_64 rng(31337);
    const std::vector<std::string> vocab = {"one", "two", "three", "four", "five", "six"};
    for (int i = 0; i < 100; ++i) {
        std::string a, b;
        for (size_t w = 0; w < 1 + rng() % 30; ++w) (a += vocab[rng() % vocab.size()]) += ' ';
        for (size_t w = 0; w < 1 + rng() % 30; ++w) (b += vocab[rng() % vocab.size()]) += ' ';
        auto ma = compute_metrics(text_doc({a}));
        auto mb = compute_metrics(text_doc({b}));
        auto mab = compute_metrics(text_doc({a + " " + b}));
        CHECK(mab.token_length == ma.token_length + mb.token_length);
        double distinct = ma.unique_words_fraction * static_cast<double>(ma.token_length);
        CHECK(distinct == doctest::Approx(std::round(distinct)));
    }
}

}  // TEST_SUITE
